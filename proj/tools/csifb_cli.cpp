// SPDX-License-Identifier: Apache-2.0
//
// csifb: compressed, dithered CSI feedback and recovery for FDD MIMO
// Copyright (C) 2026 The csifb authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#include <csifb/channel_io.hpp>
#include <csifb/harness.hpp>

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <memory>

using namespace csifb;

namespace {

constexpr int exit_ok = 0;
constexpr int exit_failed_check = 1;
constexpr int exit_config = 2;

struct Common {
    std::string config;
    std::vector<std::string> overrides;
    std::string output;
};

void add_common(CLI::App *cmd, Common &c, bool config_required = true) {
    auto *opt = cmd->add_option("-c,--config", c.config, "JSON experiment config");
    if (config_required)
        opt->required();
    cmd->add_option("-o,--override", c.overrides, "key=value (dotted keys reach nested fields)");
    cmd->add_option("--output", c.output, "write CSV here instead of stdout");
}

ExperimentConfig config_of(const Common &c) {
    if (c.config.empty()) {
        nlohmann::json j = to_json(ExperimentConfig{});
        for (const auto &o : c.overrides)
            apply_override(j, o);
        return config_from_json(j);
    }
    return load_config(c.config, c.overrides);
}

// Writes through `out` to the --output file or stdout.
template <class F> void emit(const Common &c, F &&write) {
    if (c.output.empty()) {
        write(std::cout);
        return;
    }
    std::ofstream f(c.output);
    require(static_cast<bool>(f), "cannot write '" + c.output + "'");
    write(f);
}

int run_simulate(const Common &c, const std::string &trace_path) {
    const ExperimentConfig cfg = config_of(c);
    const auto rows = simulate(cfg);
    emit(c, [&](std::ostream &os) { write_summary_csv(os, rows); });
    if (!trace_path.empty()) {
        const Scheme s = cfg.schemes().front();
        const Quantizer q = calibrate_quantizer(cfg, s);
        const std::uint64_t seed = trial_seed(cfg.master_seed, 0);
        Rng rng(derive_seed(seed, Stream::channel));
        const ChannelMatrix h = synthesize_channel(sample_channel_params(rng, cfg.array, cfg.amp_range), cfg.array);
        const EncodedTrial enc =
            encode_trial(h, s, cfg.effective_measurements(), cfg.pilot_factor, cfg.snr_db, q, seed);
        const RecoveryResult rec =
            redeem_solve(enc.payload, enc.op, q, cfg.solver, cfg.effective_K(), cfg.array.spacing_ratio, &h);
        std::ofstream f(trace_path);
        require(static_cast<bool>(f), "cannot write '" + trace_path + "'");
        write_trace_csv(f, rec.state);
    }
    return exit_ok;
}

int run_sweep(const Common &c) {
    const ExperimentConfig cfg = config_of(c);
    require(cfg.sweep.has_value(), "sweep: the config has no sweep section");
    const auto rows = sweep(cfg);
    emit(c, [&](std::ostream &os) { write_summary_csv(os, rows); });
    return exit_ok;
}

int run_validate_rate(const Common &c, double lo, double hi) {
    const ExperimentConfig cfg = config_of(c);
    require(cfg.sweep && cfg.sweep->axis == "measurements",
            "validate-rate: config needs a measurements sweep (list of R or T values)");
    std::vector<int> ms;
    for (double v : cfg.sweep->values)
        ms.push_back(static_cast<int>(std::lround(v)));
    bool ok = true;
    std::vector<RateResult> results;
    for (Scheme s : cfg.schemes()) {
        results.push_back(validate_rate(cfg, s, ms));
        ok = ok && results.back().fit.slope >= lo && results.back().fit.slope <= hi;
    }
    emit(c, [&](std::ostream &os) {
        os << "scheme,measurements,mean_mse,se_mse,slope,slope_se\n";
        for (const auto &r : results)
            for (const auto &p : r.points)
                os << to_string(r.scheme) << ',' << p.measurements << ',' << p.mean_mse << ',' << p.se_mse << ','
                   << r.fit.slope << ',' << r.fit.slope_se << '\n';
    });
    for (const auto &r : results)
        std::cerr << to_string(r.scheme) << " slope " << r.fit.slope << " (band [" << lo << ", " << hi << "])\n";
    return ok ? exit_ok : exit_failed_check;
}

int run_validate_dither(const Common &c, int levels, double lo, double hi, int points, int grid) {
    const auto rows = validate_dither_curve(levels, log_grid(lo, hi, points), grid);
    std::vector<double> l, u;
    for (const auto &r : rows) {
        l.push_back(r.l_over_f);
        u.push_back(r.u_over_f);
    }
    emit(c, [&](std::ostream &os) {
        os << "sigma_v,l_over_f,u_over_f\n";
        os.precision(10);
        for (const auto &r : rows)
            os << r.sigma << ',' << r.l_over_f << ',' << r.u_over_f << '\n';
    });
    const bool ok = has_interior_minimum(l) && has_interior_minimum(u);
    if (!ok)
        std::cerr << "validate-dither: ratio curves lack an interior minimum\n";
    return ok ? exit_ok : exit_failed_check;
}

int run_validate_srec(const Common &c, int pairs, int measurements, double constant, double threshold) {
    const ExperimentConfig cfg = config_of(c);
    require(pairs >= 100, "validate-srec: need at least 100 pairs");
    bool ok = true;
    std::vector<std::pair<Scheme, SrecResult>> results;
    for (Scheme s : cfg.schemes()) {
        const int m = measurements > 0 ? measurements : srec_measurements(cfg.array, s, constant);
        results.emplace_back(s, validate_srec(cfg, s, pairs, m));
        ok = ok && results.back().second.pass_rate() >= threshold;
    }
    emit(c, [&](std::ostream &os) {
        os << "scheme,measurements,pairs,passes,pass_rate\n";
        for (const auto &[s, r] : results)
            os << to_string(s) << ',' << r.measurements << ',' << r.pairs << ',' << r.passes << ',' << r.pass_rate()
               << '\n';
    });
    return ok ? exit_ok : exit_failed_check;
}

int run_import(const Common &c, const std::string &csv) {
    ExperimentConfig cfg = config_of(c);
    const ImportedChannel imp = read_channel_csv(csv);
    cfg.array.num_rx = static_cast<int>(imp.h.rows());
    cfg.array.num_tx = static_cast<int>(imp.h.cols());
    if (imp.num_paths && !cfg.assumed_K)
        cfg.assumed_K = *imp.num_paths;
    cfg.validate();
    std::vector<TrialResult> all;
    for (Scheme s : cfg.schemes()) {
        const Quantizer q = calibrate_quantizer(cfg, s, &imp.h);
        auto per_trial = parallel_map(cfg.trials, cfg.threads, [&](int i) {
            return recover_trial(cfg, imp.h, s, q, trial_seed(cfg.master_seed, i));
        });
        for (auto &v : per_trial)
            all.insert(all.end(), v.begin(), v.end());
    }
    const auto rows = summarize("measurements=" + std::to_string(cfg.effective_measurements()), all);
    emit(c, [&](std::ostream &os) { write_summary_csv(os, rows); });
    return exit_ok;
}

} // namespace

int main(int argc, char **argv) {
    CLI::App app{"Quantized CSI feedback simulator"};
    app.require_subcommand(1);

    Common sim, swp, rate, dith, srec, imp;
    std::string trace;
    auto *c_sim = app.add_subcommand("simulate", "run one experiment point");
    add_common(c_sim, sim);
    c_sim->add_option("--trace", trace, "convergence trace CSV of trial 0");

    auto *c_swp = app.add_subcommand("sweep", "run every point of the config's sweep axis");
    add_common(c_swp, swp);

    double rate_lo = -0.9, rate_hi = -0.3;
    auto *c_rate = app.add_subcommand("validate-rate", "fit the MSE-vs-measurements log-log slope");
    add_common(c_rate, rate);
    c_rate->add_option("--min-slope", rate_lo, "lower end of the accepted band");
    c_rate->add_option("--max-slope", rate_hi, "upper end of the accepted band");

    int levels = 4, points = 20, grid = default_constants_grid;
    double s_lo = 0.05, s_hi = 5.0;
    auto *c_dith = app.add_subcommand("validate-dither", "L_f/F_f and U_f/F_f over a dither grid");
    add_common(c_dith, dith, false);
    c_dith->add_option("--levels", levels, "quantizer levels");
    c_dith->add_option("--sigma-min", s_lo, "smallest dither level (range is [-1, 1])");
    c_dith->add_option("--sigma-max", s_hi, "largest dither level");
    c_dith->add_option("--points", points, "log-spaced grid points");
    c_dith->add_option("--grid", grid, "evaluation grid for the constants");

    int pairs = 1000, srec_m = 0;
    double srec_c = 8.0, srec_min = 0.99;
    auto *c_srec = app.add_subcommand("validate-srec", "empirical S-REC pass rate of the compression operators");
    add_common(c_srec, srec, false);
    c_srec->add_option("--pairs", pairs, "random channel pairs");
    c_srec->add_option("--measurements", srec_m, "R or T (default: c K log scaling)");
    c_srec->add_option("--constant", srec_c, "constant c of the measurement scaling");
    c_srec->add_option("--min-rate", srec_min, "required pass rate");

    std::string channel_csv;
    auto *c_imp = app.add_subcommand("import-channel", "recover an imported channel from quantized feedback");
    add_common(c_imp, imp);
    c_imp->add_option("--channel", channel_csv, "channel CSV (m,n,re,im) with .meta.json sidecar")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        const int rc = app.exit(e);
        return rc == 0 ? exit_ok : exit_config;
    }

    try {
        if (*c_sim)
            return run_simulate(sim, trace);
        if (*c_swp)
            return run_sweep(swp);
        if (*c_rate)
            return run_validate_rate(rate, rate_lo, rate_hi);
        if (*c_dith)
            return run_validate_dither(dith, levels, s_lo, s_hi, points, grid);
        if (*c_srec)
            return run_validate_srec(srec, pairs, srec_m, srec_c, srec_min);
        if (*c_imp)
            return run_import(imp, channel_csv);
    } catch (const InvalidArgument &e) {
        std::cerr << "config error: " << e.what() << '\n';
        return exit_config;
    } catch (const std::exception &e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_failed_check;
    }
    return exit_config;
}

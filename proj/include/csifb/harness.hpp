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

#ifndef CSIFB_HARNESS_HPP
#define CSIFB_HARNESS_HPP

#include "gd_baseline.hpp"
#include "metrics.hpp"
#include "parallel.hpp"
#include "redeem.hpp"

#include <nlohmann/json.hpp>

#include <chrono>
#include <cmath>
#include <fstream>
#include <functional>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

namespace csifb {

enum class SchemeSelect { scheme1, scheme2, both };

struct SweepSpec {
    std::string axis; // measurements | Q | snr_db | num_tx | assumed_K | amp_low
    std::vector<double> values;
};

inline const std::vector<std::string> &sweep_axes() {
    static const std::vector<std::string> axes{"measurements", "Q", "snr_db", "num_tx", "assumed_K", "amp_low"};
    return axes;
}

/// One Monte Carlo experiment. `Q` is the number of bits per measurement
/// (2^Q quantizer levels); `measurements` is R for Scheme 1 and T for Scheme 2.
struct ExperimentConfig {
    ArrayConfig array;
    SamplingRange amp_range = default_amp_range;
    SchemeSelect scheme = SchemeSelect::both;
    int Q = 2;
    int measurements = 250;
    std::optional<int> bit_budget; // when set, measurements = floor(bit_budget / Q)
    double snr_db = 25.0;
    int trials = 100;
    std::uint64_t master_seed = 1;
    std::optional<int> assumed_K;
    double dither_fraction = default_dither_fraction;
    int calibration_samples = 1000;
    int pilot_factor = default_pilot_length_factor; // Scheme 1 pilot length T = pilot_factor * N
    bool gd_baseline = false;
    double gd_step = 1.0;
    int threads = 0; // 0: hardware concurrency
    std::optional<SweepSpec> sweep;
    SolverConfig solver;

    int levels() const { return 1 << Q; }
    int effective_measurements() const { return bit_budget ? *bit_budget / Q : measurements; }
    int effective_K() const { return assumed_K.value_or(array.num_paths); }

    std::vector<Scheme> schemes() const {
        if (scheme == SchemeSelect::scheme1)
            return {Scheme::scheme1};
        if (scheme == SchemeSelect::scheme2)
            return {Scheme::scheme2};
        return {Scheme::scheme1, Scheme::scheme2};
    }

    void validate() const {
        array.validate();
        solver.validate();
        require(Q >= 1 && Q <= 16, "config: Q (bits per measurement) must be in [1, 16]");
        require(trials >= 1, "config: trials must be >= 1");
        require(effective_measurements() >= 1, "config: measurements must be >= 1");
        require(!bit_budget || *bit_budget >= 1, "config: bit_budget must be >= 1");
        require(!assumed_K || *assumed_K >= 1, "config: assumed_K must be >= 1");
        require(amp_range.low > 0.0 && amp_range.low <= amp_range.high && amp_range.high <= array.amp_max,
                "config: need 0 < amp_range[0] <= amp_range[1] <= amp_max");
        require(dither_fraction > 0.0, "config: dither_fraction must be > 0");
        require(calibration_samples >= 2, "config: calibration_samples must be >= 2");
        require(pilot_factor >= 1, "config: pilot_factor must be >= 1");
        require(gd_step > 0.0, "config: gd_step must be > 0");
        require(threads >= 0, "config: threads must be >= 0");
        if (sweep) {
            require(std::find(sweep_axes().begin(), sweep_axes().end(), sweep->axis) != sweep_axes().end(),
                    "config: unknown sweep axis '" + sweep->axis + "'");
            require(!sweep->values.empty(), "config: empty sweep");
        }
    }
};

// ---------------------------------------------------------------------------
// JSON config

namespace detail {

inline SchemeSelect scheme_select_from_string(const std::string &s) {
    if (s == "scheme1")
        return SchemeSelect::scheme1;
    if (s == "scheme2")
        return SchemeSelect::scheme2;
    if (s == "both")
        return SchemeSelect::both;
    throw InvalidArgument("config: scheme must be scheme1, scheme2 or both (got '" + s + "')");
}

inline std::string to_string(SchemeSelect s) {
    switch (s) {
    case SchemeSelect::scheme1:
        return "scheme1";
    case SchemeSelect::scheme2:
        return "scheme2";
    default:
        return "both";
    }
}

inline void check_keys(const nlohmann::json &j, std::initializer_list<const char *> allowed, const std::string &where) {
    require(j.is_object(), "config: " + where + " must be an object");
    for (const auto &item : j.items()) {
        bool ok = false;
        for (const char *a : allowed)
            ok = ok || item.key() == a;
        require(ok, "config: unknown key '" + item.key() + "' in " + where);
    }
}

template <class T> void read_opt(const nlohmann::json &j, const char *key, T &out) {
    if (j.contains(key) && !j.at(key).is_null())
        out = j.at(key).get<T>();
}

} // namespace detail

inline nlohmann::json to_json(const SolverConfig &s) {
    return {{"rho", s.rho},
            {"max_outer", s.max_outer},
            {"outer_tol", s.outer_tol},
            {"relax_bcd_max", s.relax_bcd_max},
            {"relax_bcd_tol", s.relax_bcd_tol},
            {"ga_max", s.ga_max},
            {"em_max", s.em_max},
            {"em_tol", s.em_tol},
            {"fft_oversample", s.fft_oversample}};
}

inline nlohmann::json to_json(const ExperimentConfig &c) {
    nlohmann::json j{{"array",
                      {{"num_tx", c.array.num_tx},
                       {"num_rx", c.array.num_rx},
                       {"spacing_ratio", c.array.spacing_ratio},
                       {"num_paths", c.array.num_paths},
                       {"amp_max", c.array.amp_max}}},
                     {"amp_range", {c.amp_range.low, c.amp_range.high}},
                     {"scheme", detail::to_string(c.scheme)},
                     {"Q", c.Q},
                     {"measurements", c.measurements},
                     {"bit_budget", nullptr},
                     {"snr_db", c.snr_db},
                     {"trials", c.trials},
                     {"master_seed", c.master_seed},
                     {"assumed_K", nullptr},
                     {"dither_fraction", c.dither_fraction},
                     {"calibration_samples", c.calibration_samples},
                     {"pilot_factor", c.pilot_factor},
                     {"gd_baseline", c.gd_baseline},
                     {"gd_step", c.gd_step},
                     {"threads", c.threads},
                     {"sweep", nullptr},
                     {"solver", to_json(c.solver)}};
    if (c.bit_budget)
        j["bit_budget"] = *c.bit_budget;
    if (c.assumed_K)
        j["assumed_K"] = *c.assumed_K;
    if (c.sweep)
        j["sweep"] = {{"axis", c.sweep->axis}, {"values", c.sweep->values}};
    return j;
}

/// Builds a config from JSON. Missing keys keep their defaults; unknown keys
/// are rejected. A list under "measurements" is shorthand for a measurements sweep.
inline ExperimentConfig config_from_json(const nlohmann::json &j) {
    using detail::read_opt;
    ExperimentConfig c;
    try {
        detail::check_keys(j,
                           {"array", "amp_range", "scheme", "Q", "measurements", "bit_budget", "snr_db", "trials",
                            "master_seed", "assumed_K", "dither_fraction", "calibration_samples", "pilot_factor",
                            "gd_baseline", "gd_step", "threads", "sweep", "solver"},
                           "config");
        if (j.contains("array")) {
            const auto &a = j.at("array");
            detail::check_keys(a, {"num_tx", "num_rx", "spacing_ratio", "num_paths", "amp_max"}, "array");
            read_opt(a, "num_tx", c.array.num_tx);
            read_opt(a, "num_rx", c.array.num_rx);
            read_opt(a, "spacing_ratio", c.array.spacing_ratio);
            read_opt(a, "num_paths", c.array.num_paths);
            read_opt(a, "amp_max", c.array.amp_max);
        }
        if (j.contains("amp_range")) {
            const auto r = j.at("amp_range").get<std::vector<double>>();
            require(r.size() == 2, "config: amp_range needs two entries");
            c.amp_range = {r[0], r[1]};
        }
        if (j.contains("scheme"))
            c.scheme = detail::scheme_select_from_string(j.at("scheme").get<std::string>());
        read_opt(j, "Q", c.Q);
        if (j.contains("measurements")) {
            const auto &m = j.at("measurements");
            if (m.is_array()) {
                const auto v = m.get<std::vector<double>>();
                require(!v.empty(), "config: empty measurements list");
                c.measurements = static_cast<int>(v.front());
                c.sweep = SweepSpec{"measurements", v};
            } else {
                c.measurements = m.get<int>();
            }
        }
        if (j.contains("bit_budget") && !j.at("bit_budget").is_null())
            c.bit_budget = j.at("bit_budget").get<int>();
        read_opt(j, "snr_db", c.snr_db);
        read_opt(j, "trials", c.trials);
        read_opt(j, "master_seed", c.master_seed);
        if (j.contains("assumed_K") && !j.at("assumed_K").is_null())
            c.assumed_K = j.at("assumed_K").get<int>();
        read_opt(j, "dither_fraction", c.dither_fraction);
        read_opt(j, "calibration_samples", c.calibration_samples);
        read_opt(j, "pilot_factor", c.pilot_factor);
        read_opt(j, "gd_baseline", c.gd_baseline);
        read_opt(j, "gd_step", c.gd_step);
        read_opt(j, "threads", c.threads);
        if (j.contains("sweep") && !j.at("sweep").is_null()) {
            const auto &s = j.at("sweep");
            detail::check_keys(s, {"axis", "values"}, "sweep");
            c.sweep = SweepSpec{s.at("axis").get<std::string>(), s.at("values").get<std::vector<double>>()};
        }
        if (j.contains("solver")) {
            const auto &s = j.at("solver");
            detail::check_keys(s,
                               {"rho", "max_outer", "outer_tol", "relax_bcd_max", "relax_bcd_tol", "ga_max", "em_max",
                                "em_tol", "fft_oversample"},
                               "solver");
            read_opt(s, "rho", c.solver.rho);
            read_opt(s, "max_outer", c.solver.max_outer);
            read_opt(s, "outer_tol", c.solver.outer_tol);
            read_opt(s, "relax_bcd_max", c.solver.relax_bcd_max);
            read_opt(s, "relax_bcd_tol", c.solver.relax_bcd_tol);
            read_opt(s, "ga_max", c.solver.ga_max);
            read_opt(s, "em_max", c.solver.em_max);
            read_opt(s, "em_tol", c.solver.em_tol);
            read_opt(s, "fft_oversample", c.solver.fft_oversample);
        }
    } catch (const nlohmann::json::exception &e) {
        throw InvalidArgument(std::string("config: ") + e.what());
    }
    c.validate();
    return c;
}

/// Applies "a.b.c=value" to a JSON document. The value is parsed as JSON when
/// possible and kept as a string otherwise.
inline void apply_override(nlohmann::json &j, const std::string &assignment) {
    const auto eq = assignment.find('=');
    require(eq != std::string::npos && eq > 0, "override '" + assignment + "' is not key=value");
    const std::string key = assignment.substr(0, eq);
    const std::string text = assignment.substr(eq + 1);
    nlohmann::json value = nlohmann::json::parse(text, nullptr, false);
    if (value.is_discarded())
        value = text;
    std::string pointer;
    std::stringstream ss(key);
    for (std::string part; std::getline(ss, part, '.');) {
        require(!part.empty(), "override '" + assignment + "' has an empty key segment");
        pointer += "/" + part;
    }
    j[nlohmann::json::json_pointer(pointer)] = value;
}

inline ExperimentConfig load_config(const std::string &path, const std::vector<std::string> &overrides = {}) {
    std::ifstream in(path);
    require(static_cast<bool>(in), "cannot open config file '" + path + "'");
    nlohmann::json j = nlohmann::json::parse(in, nullptr, false, true);
    require(!j.is_discarded(), "config file '" + path + "' is not valid JSON");
    for (const auto &o : overrides)
        apply_override(j, o);
    return config_from_json(j);
}

/// Copy of `cfg` with one sweep axis set to `value`.
inline ExperimentConfig at_axis_point(ExperimentConfig cfg, const std::string &axis, double value) {
    const int iv = static_cast<int>(std::lround(value));
    if (axis == "measurements") {
        cfg.measurements = iv;
        cfg.bit_budget.reset();
    } else if (axis == "Q") {
        cfg.Q = iv;
    } else if (axis == "snr_db") {
        cfg.snr_db = value;
    } else if (axis == "num_tx") {
        cfg.array.num_tx = iv;
    } else if (axis == "assumed_K") {
        cfg.assumed_K = iv;
    } else if (axis == "amp_low") {
        cfg.amp_range.low = value;
    } else {
        throw InvalidArgument("unknown sweep axis '" + axis + "'");
    }
    cfg.sweep.reset();
    cfg.validate();
    return cfg;
}

// ---------------------------------------------------------------------------
// Trials

struct TrialResult {
    double nmse = 0.0;
    double bgain = 0.0;
    double mse = 0.0; // ||h_hat - h||^2 / (MN) on the real embedding
    int bits = 0;
    double wall_time = 0.0; // seconds spent in the recovery
    Scheme scheme = Scheme::scheme1;
    std::string method = "redeem";
    std::uint64_t seed = 0;
};

inline std::uint64_t trial_seed(std::uint64_t master_seed, int trial_index) {
    return derive_seed(master_seed, static_cast<std::uint64_t>(trial_index));
}

/// Draws one pre-quantization sample of the quantity each scheme quantizes.
inline double calibration_sample(const ChannelMatrix &h, Scheme scheme, int measurements, int pilot_factor,
                                 double snr_db, Rng &rng) {
    const int m = static_cast<int>(h.rows()), n = static_cast<int>(h.cols());
    if (scheme == Scheme::scheme1) {
        const PilotMatrix s = make_pilots(PilotKind::orthogonal, n, pilot_factor * n, rng);
        const CMatrix y = simulate_downlink(h, s, noise_sigma_for_snr(h, s, snr_db), rng);
        const RVector a = randn(rng, 2 * m * n, 1.0 / std::sqrt(static_cast<double>(measurements)));
        return a.dot(real_embed_stacked(ls_estimate(y, s)));
    }
    const PilotMatrix s = make_pilots(PilotKind::gaussian, n, 1, rng);
    const CMatrix y = simulate_downlink(h, s, noise_sigma_for_snr(h, s, snr_db), rng);
    const RMatrix a = randn(rng, 1, 2 * m, 1.0 / measurements);
    return scheme2_compress(y, a)[0];
}

/// Quantizer calibrated on `calibration_samples` independent channel draws
/// pushed through the pipeline stage being quantized. If `channel` is given it
/// replaces the random channel model.
inline Quantizer calibrate_quantizer(const ExperimentConfig &cfg, Scheme scheme,
                                     const ChannelMatrix *channel = nullptr) {
    Rng rng(derive_seed(derive_seed(cfg.master_seed, Stream::calibration), static_cast<std::uint64_t>(scheme)));
    std::vector<double> samples(static_cast<std::size_t>(cfg.calibration_samples));
    for (auto &x : samples) {
        const ChannelMatrix h =
            channel ? *channel : synthesize_channel(sample_channel_params(rng, cfg.array, cfg.amp_range), cfg.array);
        x = calibration_sample(h, scheme, cfg.effective_measurements(), cfg.pilot_factor, cfg.snr_db, rng);
    }
    return calibrate(samples, cfg.levels(), cfg.dither_fraction);
}

struct EncodedTrial {
    FeedbackPayload payload;
    MeasurementOperator op;
};

/// UE side of one trial: downlink training, compression and dithered quantization.
inline EncodedTrial encode_trial(const ChannelMatrix &h, Scheme scheme, int measurements, int pilot_factor,
                                 double snr_db, const Quantizer &q, std::uint64_t seed) {
    const int m = static_cast<int>(h.rows()), n = static_cast<int>(h.cols());
    Rng noise_rng(derive_seed(seed, Stream::noise));
    Rng dither_rng(derive_seed(seed, Stream::dither));
    const std::uint64_t shared = derive_seed(seed, Stream::operator_draw);
    EncodedTrial out;
    if (scheme == Scheme::scheme1) {
        const PilotMatrix s = make_pilots(PilotKind::orthogonal, n, pilot_factor * n, noise_rng);
        const CMatrix y = simulate_downlink(h, s, noise_sigma_for_snr(h, s, snr_db), noise_rng);
        const RMatrix a = make_compressor_scheme1(shared, measurements, 2 * m * n);
        out.payload = encode_scheme1(ls_estimate(y, s), a, shared, q, dither_rng);
        out.op.rows = a;
        out.op.sigmas = RVector::Constant(measurements, q.dither_sigma());
        out.op.num_rx = m;
        out.op.num_tx = n;
    } else {
        const PilotMatrix s = scheme2_pilots(shared, n, measurements);
        const double sn = noise_sigma_for_snr(h, s, snr_db);
        const CMatrix y = simulate_downlink(h, s, sn, noise_rng);
        out.payload = encode_scheme2(y, s, shared, q, sn, dither_rng);
        out.op = operator_for(out.payload, q);
    }
    return out;
}

/// Runs REDEEM (and the GD baseline when enabled) on one channel.
inline std::vector<TrialResult> recover_trial(const ExperimentConfig &cfg, const ChannelMatrix &h, Scheme scheme,
                                              const Quantizer &q, std::uint64_t seed) {
    const EncodedTrial enc =
        encode_trial(h, scheme, cfg.effective_measurements(), cfg.pilot_factor, cfg.snr_db, q, seed);
    const double mn = static_cast<double>(h.size());
    auto finish = [&](const CMatrix &est, double secs, const char *method) {
        TrialResult r;
        r.nmse = nmse(h, est);
        r.bgain = est.squaredNorm() > 0.0 ? bgain(h, est) : 0.0;
        r.mse = (h - est).squaredNorm() / mn;
        r.bits = enc.payload.measurements() * cfg.Q;
        r.wall_time = secs;
        r.scheme = scheme;
        r.method = method;
        r.seed = seed;
        return r;
    };
    std::vector<TrialResult> out;
    auto t0 = std::chrono::steady_clock::now();
    const RecoveryResult rec =
        redeem_solve(enc.payload, enc.op, q, cfg.solver, cfg.effective_K(), cfg.array.spacing_ratio);
    auto t1 = std::chrono::steady_clock::now();
    out.push_back(finish(rec.channel, std::chrono::duration<double>(t1 - t0).count(), "redeem"));
    if (cfg.gd_baseline) {
        t0 = std::chrono::steady_clock::now();
        const GdResult gd = gd_baseline(enc.payload, enc.op, q, cfg.effective_K(), cfg.array.spacing_ratio,
                                        cfg.gd_step, cfg.solver.max_outer);
        t1 = std::chrono::steady_clock::now();
        out.push_back(finish(gd.channel, std::chrono::duration<double>(t1 - t0).count(), "gd"));
    }
    return out;
}

/// One seeded trial of the random-channel experiment with a pre-calibrated quantizer.
inline std::vector<TrialResult> run_trial(const ExperimentConfig &cfg, Scheme scheme, const Quantizer &q,
                                          std::uint64_t seed) {
    Rng rng(derive_seed(seed, Stream::channel));
    const ChannelMatrix h = synthesize_channel(sample_channel_params(rng, cfg.array, cfg.amp_range), cfg.array);
    return recover_trial(cfg, h, scheme, q, seed);
}

/// Single-scheme convenience form: calibrates, then runs the REDEEM trial.
inline TrialResult run_trial(const ExperimentConfig &cfg, std::uint64_t seed) {
    require(cfg.scheme != SchemeSelect::both, "run_trial: pick a single scheme");
    const Scheme s = cfg.schemes().front();
    return run_trial(cfg, s, calibrate_quantizer(cfg, s), seed).front();
}

// ---------------------------------------------------------------------------
// Aggregation

struct SummaryRow {
    std::string axis;   // "name=value" of the experiment point
    std::string scheme; // scheme1 | scheme2, suffixed _gd for the baseline
    double mean_nmse = 0.0;
    double se_nmse = 0.0;
    double mean_bgain = 0.0;
    double mean_mse = 0.0;
    double se_mse = 0.0;
    int bits = 0;
    int trials = 0;
};

inline std::pair<double, double> mean_and_se(const std::vector<double> &v) {
    require(!v.empty(), "mean_and_se: no values");
    double mean = 0.0;
    for (double x : v)
        mean += x;
    mean /= static_cast<double>(v.size());
    if (v.size() < 2)
        return {mean, 0.0};
    double ss = 0.0;
    for (double x : v)
        ss += (x - mean) * (x - mean);
    return {mean, std::sqrt(ss / static_cast<double>(v.size() - 1) / static_cast<double>(v.size()))};
}

inline std::vector<SummaryRow> summarize(const std::string &axis, const std::vector<TrialResult> &results) {
    std::vector<std::pair<std::string, std::vector<const TrialResult *>>> groups;
    for (const auto &r : results) {
        const std::string label = to_string(r.scheme) + (r.method == "redeem" ? "" : "_" + r.method);
        auto it = std::find_if(groups.begin(), groups.end(), [&](const auto &g) { return g.first == label; });
        if (it == groups.end()) {
            groups.push_back({label, {}});
            it = std::prev(groups.end());
        }
        it->second.push_back(&r);
    }
    std::vector<SummaryRow> rows;
    for (const auto &[label, members] : groups) {
        std::vector<double> e, g, m;
        for (const auto *r : members) {
            e.push_back(r->nmse);
            g.push_back(r->bgain);
            m.push_back(r->mse);
        }
        SummaryRow row;
        row.axis = axis;
        row.scheme = label;
        std::tie(row.mean_nmse, row.se_nmse) = mean_and_se(e);
        row.mean_bgain = mean_and_se(g).first;
        std::tie(row.mean_mse, row.se_mse) = mean_and_se(m);
        row.bits = members.front()->bits;
        row.trials = static_cast<int>(members.size());
        rows.push_back(row);
    }
    return rows;
}

inline void write_summary_csv(std::ostream &os, const std::vector<SummaryRow> &rows) {
    os << "axis,scheme,mean_nmse,se_nmse,mean_bgain,bits,trials\n";
    os.precision(10);
    for (const auto &r : rows)
        os << r.axis << ',' << r.scheme << ',' << r.mean_nmse << ',' << r.se_nmse << ',' << r.mean_bgain << ','
           << r.bits << ',' << r.trials << '\n';
}

inline std::string format_axis_value(double v) {
    std::ostringstream os;
    os << v;
    return os.str();
}

/// All trials of one experiment point for every configured scheme, in
/// (scheme, trial index) order regardless of how the work was scheduled.
inline std::vector<TrialResult> run_point(const ExperimentConfig &cfg) {
    cfg.validate();
    std::vector<TrialResult> all;
    for (Scheme s : cfg.schemes()) {
        const Quantizer q = calibrate_quantizer(cfg, s);
        auto per_trial = parallel_map(cfg.trials, cfg.threads, [&](int i) {
            return run_trial(cfg, s, q, trial_seed(cfg.master_seed, i));
        });
        for (auto &v : per_trial)
            all.insert(all.end(), v.begin(), v.end());
    }
    return all;
}

inline std::vector<SummaryRow> simulate(const ExperimentConfig &cfg) {
    return summarize("measurements=" + std::to_string(cfg.effective_measurements()), run_point(cfg));
}

/// One summary row per (axis point, scheme).
inline std::vector<SummaryRow> sweep(const ExperimentConfig &cfg) {
    require(cfg.sweep.has_value() && !cfg.sweep->values.empty(), "sweep: config has no sweep axis");
    std::vector<SummaryRow> rows;
    for (double v : cfg.sweep->values) {
        const ExperimentConfig point = at_axis_point(cfg, cfg.sweep->axis, v);
        auto r = summarize(cfg.sweep->axis + "=" + format_axis_value(v), run_point(point));
        rows.insert(rows.end(), r.begin(), r.end());
    }
    return rows;
}

// ---------------------------------------------------------------------------
// Theory checks

struct LineFit {
    double slope = 0.0;
    double intercept = 0.0;
    double slope_se = 0.0;
};

inline LineFit fit_line(const std::vector<double> &x, const std::vector<double> &y) {
    require(x.size() == y.size() && x.size() >= 2, "fit_line: need matching inputs with >= 2 points");
    const double n = static_cast<double>(x.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    require(sxx > 0.0, "fit_line: x values are all equal");
    LineFit f;
    f.slope = sxy / sxx;
    f.intercept = my - f.slope * mx;
    if (x.size() > 2) {
        double rss = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i) {
            const double e = y[i] - f.intercept - f.slope * x[i];
            rss += e * e;
        }
        f.slope_se = std::sqrt(rss / (n - 2.0) / sxx);
    }
    return f;
}

struct RatePoint {
    int measurements = 0;
    double mean_mse = 0.0;
    double se_mse = 0.0;
};

struct RateResult {
    Scheme scheme = Scheme::scheme1;
    std::vector<RatePoint> points;
    LineFit fit; // log(mean MSE) against log(measurements)
};

/// Log-log slope of the mean per-entry MSE against R (Scheme 1) or T (Scheme 2).
inline RateResult validate_rate(const ExperimentConfig &cfg, Scheme scheme, const std::vector<int> &measurements) {
    require(measurements.size() >= 4, "validate_rate: need at least 4 measurement counts");
    RateResult out;
    out.scheme = scheme;
    std::vector<double> lx, ly;
    for (int r : measurements) {
        ExperimentConfig point = at_axis_point(cfg, "measurements", r);
        point.scheme = scheme == Scheme::scheme1 ? SchemeSelect::scheme1 : SchemeSelect::scheme2;
        point.gd_baseline = false;
        std::vector<double> mse;
        for (const auto &t : run_point(point))
            mse.push_back(t.mse);
        const auto [m, se] = mean_and_se(mse);
        out.points.push_back({r, m, se});
        lx.push_back(std::log(static_cast<double>(r)));
        ly.push_back(std::log(m));
    }
    out.fit = fit_line(lx, ly);
    return out;
}

struct DitherRow {
    double sigma = 0.0;
    double l_over_f = 0.0;
    double u_over_f = 0.0;
};

/// Ratios L_f/F_f and U_f/F_f for a quantizer with `num_levels` cells calibrated
/// on the symmetric samples {-1, 1}, evaluated on [-1, 1] for each dither level.
inline std::vector<DitherRow> validate_dither_curve(int num_levels, const std::vector<double> &sigmas,
                                                    int grid_points = default_constants_grid) {
    require(num_levels >= 2, "validate_dither_curve: need at least 2 levels");
    const std::vector<double> symmetric{-1.0, 1.0};
    const Quantizer base = calibrate(symmetric, num_levels);
    std::vector<DitherRow> rows;
    for (double s : sigmas) {
        require(s > 0.0, "validate_dither_curve: sigma must be > 0");
        const Quantizer q(base.levels(), base.interior_boundaries(), s, base.range_low(), base.range_high());
        const LikelihoodConstants c = likelihood_constants(q, grid_points);
        rows.push_back({s, c.l_f / c.f_f, c.u_f / c.f_f});
    }
    return rows;
}

/// Geometric grid of `n` points from lo to hi inclusive.
inline std::vector<double> log_grid(double lo, double hi, int n) {
    require(lo > 0.0 && hi > lo && n >= 2, "log_grid: need 0 < lo < hi and n >= 2");
    std::vector<double> g(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i)
        g[static_cast<std::size_t>(i)] = lo * std::pow(hi / lo, static_cast<double>(i) / (n - 1));
    return g;
}

/// True when the minimum of `v` sits strictly inside the sequence.
inline bool has_interior_minimum(const std::vector<double> &v) {
    if (v.size() < 3)
        return false;
    const auto it = std::min_element(v.begin(), v.end());
    const auto k = static_cast<std::size_t>(it - v.begin());
    return k > 0 && k + 1 < v.size() && *it < v.front() && *it < v.back();
}

/// Measurement count from the sample-complexity scaling with an explicit constant:
/// R = c K log(sqrt(kappa) L K) for Scheme 1 and T = c (K log(sqrt(kappa) L K))^2 for Scheme 2.
inline int srec_measurements(const ArrayConfig &a, Scheme scheme, double constant = 8.0) {
    const double k = a.num_paths;
    const double l = std::log(std::sqrt(a.amp_max) * lipschitz_bound(a) * k);
    const double v = scheme == Scheme::scheme1 ? constant * k * l : constant * k * k * l * l;
    return static_cast<int>(std::ceil(v));
}

struct SrecResult {
    int pairs = 0;
    int passes = 0;
    int measurements = 0;
    double gamma = 0.5;
    double epsilon = 0.0;

    double pass_rate() const { return pairs > 0 ? static_cast<double>(passes) / pairs : 0.0; }
};

/// Fraction of random channel pairs (h, h') for which ||Op (h - h')|| >= gamma ||h - h'|| - epsilon,
/// with one operator drawn for all pairs. Scheme 1 uses A (entries N(0, 1/R)) on the
/// stacked vector; Scheme 2 uses rows (s~_t kron a_t) / sqrt(T) with unit-variance
/// s~_t and a_t on the block embedding.
inline SrecResult validate_srec(const ExperimentConfig &cfg, Scheme scheme, int num_pairs, int measurements,
                                double gamma = 0.5, std::optional<double> epsilon = std::nullopt) {
    require(num_pairs >= 1, "validate_srec: need at least one pair");
    require(measurements >= 1, "validate_srec: measurements must be >= 1");
    SrecResult out;
    out.pairs = num_pairs;
    out.measurements = measurements;
    out.gamma = gamma;
    out.epsilon = epsilon.value_or(1.0 / cfg.array.num_paths);
    const int m = cfg.array.num_rx, n = cfg.array.num_tx;
    Rng rng(derive_seed(cfg.master_seed, Stream::srec));

    RMatrix a, s;
    if (scheme == Scheme::scheme1) {
        a = randn(rng, measurements, 2 * m * n, 1.0 / std::sqrt(static_cast<double>(measurements)));
    } else {
        a = randn(rng, measurements, 2 * m, 1.0);
        s = randn(rng, measurements, 2 * n, 1.0);
    }
    for (int p = 0; p < num_pairs; ++p) {
        const CMatrix h1 = synthesize_channel(sample_channel_params(rng, cfg.array, cfg.amp_range), cfg.array);
        const CMatrix h2 = synthesize_channel(sample_channel_params(rng, cfg.array, cfg.amp_range), cfg.array);
        double lhs = 0.0, dist = 0.0;
        if (scheme == Scheme::scheme1) {
            const RVector d = real_embed_stacked(h1 - h2);
            lhs = (a * d).norm();
            dist = d.norm();
        } else {
            const RMatrix d = real_block_matrix(h1 - h2);
            const RMatrix ad = a * d; // T x 2N, row t = a_t^T D~
            lhs = std::sqrt(ad.cwiseProduct(s).rowwise().sum().squaredNorm() / measurements);
            dist = d.norm();
        }
        if (lhs >= gamma * dist - out.epsilon)
            ++out.passes;
    }
    return out;
}

} // namespace csifb

#endif

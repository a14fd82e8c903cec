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

// Acceptance report: one [PASS]/[FAIL] line per criterion with the measured
// values. Exit status is nonzero when any selected criterion fails.
//
//   csifb_acceptance [--only N] [--threads T]

#include "property_checks.hpp"

#include <csifb/harness.hpp>

#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <functional>
#include <map>
#include <sstream>
#include <string>

using namespace csifb;

namespace {

int g_threads = 0;

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4g", v);
    return buf;
}

ExperimentConfig base_config() {
    ExperimentConfig c; // (M, N, K) = (16, 32, 6), amplitudes in [0.5, 1], 25 dB
    c.threads = g_threads;
    return c;
}

std::map<std::string, double> mean_nmse_by_scheme(const ExperimentConfig &c) {
    std::map<std::string, double> out;
    for (const auto &row : summarize("", run_point(c)))
        out[row.scheme] = row.mean_nmse;
    return out;
}

Outcome gd_contrast() {
    ExperimentConfig c = base_config();
    c.scheme = SchemeSelect::scheme1;
    c.Q = 3;
    c.measurements = 300;
    c.trials = 20;
    c.gd_baseline = true; // same max_outer budget for both methods
    auto m = mean_nmse_by_scheme(c);
    const double ratio = m["scheme1_gd"] / m["scheme1"];
    return {ratio >= 2.0, "redeem " + fmt(m["scheme1"]) + ", gd " + fmt(m["scheme1_gd"]) + ", ratio " + fmt(ratio) +
                              " (need >= 2)"};
}

Outcome point_500_bits() {
    ExperimentConfig c = base_config();
    c.Q = 2;
    c.measurements = 250;
    c.trials = 100;
    auto m = mean_nmse_by_scheme(c);
    const bool ok = m["scheme1"] <= 4e-2 && m["scheme2"] <= 8e-2;
    return {ok, "scheme1 " + fmt(m["scheme1"]) + " (need <= 0.04), scheme2 " + fmt(m["scheme2"]) + " (need <= 0.08)"};
}

Outcome bit_budget_shape() {
    ExperimentConfig c = base_config();
    c.bit_budget = 900;
    c.trials = 50;
    c.sweep = SweepSpec{"Q", {2, 3, 4, 5, 6, 7}};
    std::map<std::string, std::pair<double, int>> best;
    std::ostringstream curve;
    for (const auto &row : sweep(c)) {
        const int q = std::stoi(row.axis.substr(2));
        curve << ' ' << row.scheme << "@Q" << q << '=' << fmt(row.mean_nmse);
        auto it = best.find(row.scheme);
        if (it == best.end() || row.mean_nmse < it->second.first)
            best[row.scheme] = {row.mean_nmse, q};
    }
    const int q1 = best["scheme1"].second, q2 = best["scheme2"].second;
    const bool ok = std::abs(q1 - 4) <= 1 && std::abs(q2 - 4) <= 1;
    return {ok, "best Q scheme1 " + std::to_string(q1) + ", scheme2 " + std::to_string(q2) + " (need 4 +- 1);" +
                    curve.str()};
}

Outcome rate_slope() {
    ExperimentConfig c = base_config();
    c.Q = 3;
    c.trials = 100;
    const std::vector<int> rs{100, 200, 400, 800};
    bool ok = true;
    std::string detail;
    for (Scheme s : {Scheme::scheme1, Scheme::scheme2}) {
        const RateResult r = validate_rate(c, s, rs);
        ok = ok && r.fit.slope >= -0.9 && r.fit.slope <= -0.3;
        detail += to_string(s) + " slope " + fmt(r.fit.slope) + " +- " + fmt(r.fit.slope_se) + " [mse";
        for (const auto &p : r.points)
            detail += " " + fmt(p.mean_mse);
        detail += "]; ";
    }
    return {ok, detail + "need slope in [-0.9, -0.3]"};
}

Outcome dither_curve() {
    const auto rows = validate_dither_curve(4, log_grid(0.05, 5.0, 20));
    std::vector<double> l, u;
    for (const auto &r : rows) {
        l.push_back(r.l_over_f);
        u.push_back(r.u_over_f);
    }
    const auto arg = [](const std::vector<double> &v, const std::vector<DitherRow> &rs) {
        return rs[static_cast<std::size_t>(std::min_element(v.begin(), v.end()) - v.begin())].sigma;
    };
    const bool ok = has_interior_minimum(l) && has_interior_minimum(u);
    return {ok, "L/F min at sigma " + fmt(arg(l, rows)) + ", U/F min at sigma " + fmt(arg(u, rows)) +
                    " (grid 0.05..5, 20 points)"};
}

Outcome assumed_k() {
    ExperimentConfig c = base_config();
    c.Q = 3;
    c.measurements = 300;
    c.trials = 30;
    bool ok = true;
    std::string detail;
    std::map<std::string, std::map<int, double>> by;
    for (int k : {4, 6, 8})
        for (const auto &[scheme, v] : mean_nmse_by_scheme(at_axis_point(c, "assumed_K", k)))
            by[scheme][k] = v;
    for (auto &[scheme, v] : by) {
        const double over = v[8] / v[6], under = v[4] / v[6];
        ok = ok && over <= 2.0 && under >= 5.0;
        detail += scheme + " K4/K6/K8 " + fmt(v[4]) + "/" + fmt(v[6]) + "/" + fmt(v[8]) + " ratios " + fmt(over) +
                  " (need <= 2), " + fmt(under) + " (need >= 5); ";
    }
    return {ok, detail};
}

Outcome property_suite() {
    std::ostringstream d;
    bool ok = true;
    auto check = [&](const char *name, bool pass, const std::string &val) {
        ok = ok && pass;
        d << name << ' ' << val << (pass ? "" : " FAILED") << "; ";
    };
    const double norm = checks::cell_prob_normalization_error();
    check("normalization", norm <= 1e-12, fmt(norm));
    const double nll = checks::nll_gradient_error();
    check("nll-grad", nll <= 1e-4, fmt(nll));
    const double hr = checks::hr_gradient_error();
    check("hr-grad", hr <= 1e-5, fmt(hr));
    const checks::EmMonotonicity em = checks::em_monotonicity(100);
    check("em-monotone", em.violations == 0, std::to_string(em.subproblems - em.violations) + "/100");
    const checks::RelaxRecovery rr = checks::relax_single_path();
    check("relax-K1", rr.angle_error < 1e-3, fmt(rr.angle_error));
    const double ls = checks::ls_exactness_error();
    check("ls", ls < 1e-10, fmt(ls));
    const double kr = checks::khatri_rao_row_error();
    check("khatri-rao", kr < 1e-12, fmt(kr));
    check("shared-seed", checks::shared_seed_determinism(), "");
    const ExperimentConfig c = base_config();
    for (Scheme s : {Scheme::scheme1, Scheme::scheme2}) {
        const int r = srec_measurements(c.array, s);
        const SrecResult sr = validate_srec(c, s, 1000, r);
        check(s == Scheme::scheme1 ? "srec-A" : "srec-D", sr.pass_rate() >= 0.99,
              fmt(sr.pass_rate()) + " at " + std::to_string(r));
    }
    return {ok, d.str()};
}

} // namespace

int main(int argc, char **argv) {
    int only = 0;
    for (int i = 1; i < argc; ++i) {
        if (!std::strcmp(argv[i], "--only") && i + 1 < argc)
            only = std::atoi(argv[++i]);
        else if (!std::strcmp(argv[i], "--threads") && i + 1 < argc)
            g_threads = std::atoi(argv[++i]);
        else {
            std::fprintf(stderr, "usage: %s [--only N] [--threads T]\n", argv[0]);
            return 2;
        }
    }
    const std::vector<std::pair<const char *, std::function<Outcome()>>> criteria{
        {"gd-contrast", gd_contrast},    {"500-bit-point", point_500_bits},   {"bit-budget-Q", bit_budget_shape},
        {"rate-slope", rate_slope},      {"dither-curve", dither_curve}, {"assumed-K", assumed_k},
        {"property-suite", property_suite}};
    if (only < 0 || only > static_cast<int>(criteria.size())) {
        std::fprintf(stderr, "--only must be in 1..%zu\n", criteria.size());
        return 2;
    }
    bool all = true;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        if (only && static_cast<int>(i) + 1 != only)
            continue;
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = criteria[i].second();
        } catch (const std::exception &e) {
            o = {false, std::string("error: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        all = all && o.pass;
        std::printf("[%s] %zu %s: %s (%.0f s)\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first,
                    o.detail.c_str(), secs);
        std::fflush(stdout);
    }
    return all ? 0 : 1;
}

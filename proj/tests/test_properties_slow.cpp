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

// Monte Carlo properties of the full pipeline. Slower than the unit tests;
// dimensions are reduced wherever the property allows it.

#include <csifb/harness.hpp>

#include <gtest/gtest.h>

#include <numeric>

using namespace csifb;

namespace {

ExperimentConfig reduced(int trials) {
    ExperimentConfig c;
    c.array.num_rx = 8;
    c.array.num_tx = 16;
    c.array.num_paths = 3;
    c.scheme = SchemeSelect::scheme1;
    c.Q = 3;
    c.measurements = 150;
    c.trials = trials;
    c.calibration_samples = 300;
    return c;
}

std::pair<double, double> point_nmse(const ExperimentConfig &c) {
    std::vector<double> v;
    for (const auto &t : run_point(c))
        v.push_back(t.nmse);
    return mean_and_se(v);
}

// Each step may rise by at most two (combined) standard errors.
void expect_non_increasing(const std::vector<std::pair<double, double>> &pts) {
    for (std::size_t i = 1; i < pts.size(); ++i)
        EXPECT_LE(pts[i].first, pts[i - 1].first + 2.0 * std::hypot(pts[i].second, pts[i - 1].second))
            << "step " << i;
}

} // namespace

TEST(Admm, FinalResidualBelowInitial) {
    ExperimentConfig c; // (16, 32, 6), Q = 3, R = 300
    c.scheme = SchemeSelect::scheme1;
    c.Q = 3;
    c.measurements = 300;
    const Quantizer q = calibrate_quantizer(c, Scheme::scheme1);
    const int trials = 100;
    const auto ok = parallel_map(trials, 0, [&](int i) {
        const std::uint64_t seed = trial_seed(7, i);
        Rng rng(derive_seed(seed, Stream::channel));
        const ChannelMatrix h = synthesize_channel(sample_channel_params(rng, c.array, c.amp_range), c.array);
        const EncodedTrial enc = encode_trial(h, Scheme::scheme1, 300, c.pilot_factor, c.snr_db, q, seed);
        const RecoveryResult r = redeem_solve(enc.payload, enc.op, q, c.solver, 6, 0.5);
        const auto &res = r.state.residual_history;
        for (double x : res)
            if (!std::isfinite(x))
                return 0;
        return res.size() >= 2 && res.back() < res.front() ? 1 : 0;
    });
    EXPECT_GE(std::accumulate(ok.begin(), ok.end(), 0), 95);
}

TEST(Harness, NmseNonIncreasingInMeasurements) {
    std::vector<std::pair<double, double>> pts;
    for (int r : {60, 120, 240}) {
        ExperimentConfig c = reduced(20);
        c.measurements = r;
        pts.push_back(point_nmse(c));
    }
    expect_non_increasing(pts);
    EXPECT_LT(pts.back().first, pts.front().first);
}

TEST(Harness, NmseNonIncreasingInSnr) {
    std::vector<std::pair<double, double>> pts;
    for (double snr : {0.0, 5.0, 10.0, 15.0, 20.0, 25.0, 30.0}) {
        ExperimentConfig c = reduced(20);
        c.snr_db = snr;
        pts.push_back(point_nmse(c));
    }
    expect_non_increasing(pts);
}

TEST(Harness, NmseInsensitiveToBsAntennas) {
    // (M, K) = (16, 6), Q = 3, R = 300.
    std::vector<double> means;
    for (int n : {16, 32, 48, 64}) {
        ExperimentConfig c;
        c.scheme = SchemeSelect::scheme1;
        c.Q = 3;
        c.measurements = 300;
        c.trials = 20;
        c.array.num_tx = n;
        means.push_back(point_nmse(c).first);
    }
    const auto [lo, hi] = std::minmax_element(means.begin(), means.end());
    EXPECT_LT((*hi - *lo) / *lo, 0.5) << means[0] << ' ' << means[1] << ' ' << means[2] << ' ' << means[3];
}

TEST(Harness, PenaltyDoublingChangesNmseLittle) {
    ExperimentConfig c = reduced(20);
    const double a = point_nmse(c).first;
    c.solver.rho *= 2.0;
    const double b = point_nmse(c).first;
    EXPECT_LT(std::max(a, b) / std::min(a, b), 2.0) << a << ' ' << b;
}

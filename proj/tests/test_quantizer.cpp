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

#include "property_checks.hpp"

#include <csifb/gaussian.hpp>
#include <csifb/quantizer.hpp>

#include <gtest/gtest.h>

using namespace csifb;
using checks::symmetric_quantizer;

namespace {

// Composite Simpson rule for the N(x, sigma^2) density over [a, b].
double gaussian_mass_simpson(double a, double b, double x, double sigma, int panels = 4000) {
    const double h = (b - a) / panels;
    auto f = [&](double t) { return std::exp(-0.5 * (t - x) * (t - x) / (sigma * sigma)) / (sigma * std::sqrt(2 * pi)); };
    double s = f(a) + f(b);
    for (int i = 1; i < panels; ++i)
        s += (i % 2 ? 4.0 : 2.0) * f(a + i * h);
    return s * h / 3.0;
}

} // namespace

TEST(Calibrate, SymmetricTwoLevel) {
    const std::vector<double> s{-1.0, 0.3, 1.0};
    const Quantizer q = calibrate(s, 2);
    ASSERT_EQ(q.interior_boundaries().size(), 1u);
    EXPECT_DOUBLE_EQ(q.interior_boundaries()[0], 0.0);
    EXPECT_DOUBLE_EQ(q.levels()[0], -0.5);
    EXPECT_DOUBLE_EQ(q.levels()[1], 0.5);
}

TEST(Calibrate, DefaultDitherFractionIsQuarterOfMaxAmplitude) {
    EXPECT_EQ(default_dither_fraction, 0.25);
    const std::vector<double> s{-3.0, 1.0, 2.0};
    EXPECT_DOUBLE_EQ(calibrate(s, 4).dither_sigma(), 0.75);
}

TEST(Calibrate, FourLevelsOnPlusMinusTwo) {
    const std::vector<double> s{-2.0, 2.0};
    const Quantizer q = calibrate(s, 4);
    const std::vector<double> b{-1.0, 0.0, 1.0}, l{-1.5, -0.5, 0.5, 1.5};
    for (int i = 0; i < 3; ++i)
        EXPECT_DOUBLE_EQ(q.interior_boundaries()[static_cast<std::size_t>(i)], b[static_cast<std::size_t>(i)]);
    for (int i = 0; i < 4; ++i)
        EXPECT_DOUBLE_EQ(q.levels()[static_cast<std::size_t>(i)], l[static_cast<std::size_t>(i)]);
    EXPECT_EQ(q.lower(0), -gauss::inf);
    EXPECT_EQ(q.upper(3), gauss::inf);
    for (int i = 0; i + 1 < 4; ++i)
        EXPECT_EQ(q.upper(i), q.lower(i + 1));
}

TEST(Calibrate, RejectsDegenerateInput) {
    const std::vector<double> flat{1.0, 1.0};
    const std::vector<double> ok{0.0, 1.0};
    EXPECT_THROW(calibrate(flat, 4), InvalidArgument);
    EXPECT_THROW(calibrate(ok, 1), InvalidArgument);
    EXPECT_THROW(calibrate(std::span<const double>{}, 4), InvalidArgument);
}

TEST(Quantize, MidpointsBoundariesAndDither) {
    const Quantizer q = symmetric_quantizer(4, 0.1);
    for (int i = 0; i < 4; ++i)
        EXPECT_EQ(quantize(q.levels()[static_cast<std::size_t>(i)], 0.0, q), i);
    EXPECT_EQ(quantize(0.0, 0.0, q), 2);
    EXPECT_EQ(quantize(-0.5, 0.0, q), 1);
    EXPECT_EQ(quantize(-100.0, 0.0, q), 0);
    EXPECT_EQ(quantize(100.0, 0.0, q), 3);
    Rng rng(1);
    for (int t = 0; t < 1000; ++t) {
        const double x = 2.0 * randn(rng, 1)[0], v = randn(rng, 1)[0];
        EXPECT_EQ(quantize(x, v, q), quantize(x + v, 0.0, q));
    }
}

TEST(CellProb, NormalizesToOne) { EXPECT_LT(checks::cell_prob_normalization_error(), 1e-12); }

TEST(CellProb, BoundaryOfSymmetricTwoLevelIsHalf) {
    const Quantizer q = symmetric_quantizer(2, 0.3);
    EXPECT_NEAR(cell_prob(0, 0.0, q), 0.5, 1e-15);
    EXPECT_NEAR(cell_prob(1, 0.0, q), 0.5, 1e-15);
}

TEST(CellProb, MatchesQuadrature) {
    const Quantizer q = symmetric_quantizer(4, 0.25);
    // Cell 2 is [0, 0.5).
    EXPECT_NEAR(cell_prob(2, 0.0, q), gaussian_mass_simpson(0.0, 0.5, 0.0, 0.25), 1e-10);
    // Outer cell, truncated at 10 sigma for the quadrature.
    EXPECT_NEAR(cell_prob(3, 0.2, q), gaussian_mass_simpson(0.5, 0.2 + 10 * 0.25, 0.2, 0.25), 1e-10);
}

TEST(CellProb, StableInTheTails) {
    const Quantizer q = symmetric_quantizer(4, 0.01);
    const double lp = log_cell_prob(0, 0.9, q, 0.01);
    EXPECT_TRUE(std::isfinite(lp));
    EXPECT_LT(lp, -1000.0);
    // Asymptotic log tail of the Gaussian: -t^2/2 - log(t sqrt(2 pi)).
    const double t = (0.9 + 0.5) / 0.01;
    EXPECT_NEAR(lp, -0.5 * t * t - std::log(t * std::sqrt(2 * pi)), 1e-3);
}

TEST(CellProb, UnimodalAroundNearestLevel) {
    const Quantizer q = symmetric_quantizer(4, 0.2);
    for (int r = 0; r < 4; ++r) {
        const double c = q.levels()[static_cast<std::size_t>(r)];
        const double half = 0.25;
        double prev = cell_prob(r, c, q);
        for (int s = 1; s <= 10; ++s) {
            const double d = half * s / 10.0;
            const double up = cell_prob(r, c + d, q), dn = cell_prob(r, c - d, q);
            if (r < 3) {
                EXPECT_LT(up, prev + 1e-15);
            }
            if (r > 0) {
                EXPECT_LT(dn, prev + 1e-15);
            }
            if (r > 0 && r < 3)
                prev = std::max(up, dn);
        }
    }
}

TEST(CellProb, MonteCarloFrequencies) {
    const Quantizer q = symmetric_quantizer(4, 0.3);
    Rng rng(2);
    std::normal_distribution<double> v(0.0, 0.3);
    const double x = 0.17;
    const int n = 100000;
    std::vector<int> counts(4, 0);
    for (int i = 0; i < n; ++i)
        ++counts[static_cast<std::size_t>(quantize(x, v(rng), q))];
    for (int r = 0; r < 4; ++r) {
        const double p = cell_prob(r, x, q);
        const double se = std::sqrt(p * (1 - p) / n);
        EXPECT_NEAR(counts[static_cast<std::size_t>(r)] / static_cast<double>(n), p, 3 * se + 1e-12);
    }
}

TEST(Likelihood, MidpointOfWideCellIsNearZero) {
    const Quantizer q = symmetric_quantizer(2, 0.01);
    const std::vector<LevelIndex> r{1};
    RVector x(1), s(1);
    x << 0.5;
    s << 0.01;
    EXPECT_LT(neg_log_likelihood(r, x, s, q), 1e-12);
}

TEST(Likelihood, IsMeanOfNegativeLogCellProbs) {
    const Quantizer q = symmetric_quantizer(4, 0.2);
    Rng rng(3);
    const RVector x = randn(rng, 12, 0.6);
    RVector s = RVector::Constant(12, 0.2);
    s[3] = 0.5;
    std::vector<LevelIndex> r(12);
    double ref = 0.0;
    for (int i = 0; i < 12; ++i) {
        r[static_cast<std::size_t>(i)] = i % 4;
        ref -= std::log(cell_prob(i % 4, x[i], q, s[i]));
    }
    EXPECT_NEAR(neg_log_likelihood(r, x, s, q), ref / 12, 1e-12);
    EXPECT_NEAR(nll_sum(r, x, s, q), ref, 1e-10);
}

TEST(Likelihood, GradientMatchesFiniteDifferences) { EXPECT_LE(checks::nll_gradient_error(), 1e-4); }

TEST(Likelihood, FiniteOnCalibratedDomainPlusTenSigma) {
    const Quantizer q = symmetric_quantizer(8, 0.05);
    const double lo = -1 - 10 * 0.05, hi = 1 + 10 * 0.05;
    for (int g = 0; g <= 400; ++g) {
        const double x = lo + (hi - lo) * g / 400.0;
        for (int r = 0; r < 8; ++r)
            ASSERT_TRUE(std::isfinite(cell_nll(r, x, q, 0.05))) << x << " " << r;
    }
}

TEST(Likelihood, LengthMismatchThrows) {
    const Quantizer q = symmetric_quantizer(2, 0.2);
    const std::vector<LevelIndex> r{0, 1};
    EXPECT_THROW(neg_log_likelihood(r, RVector::Zero(3), RVector::Ones(2), q), InvalidArgument);
}

TEST(Constants, PositiveAndFinite) {
    const LikelihoodConstants c = likelihood_constants(symmetric_quantizer(4, 0.3));
    EXPECT_GT(c.u_f, 0.0);
    EXPECT_GT(c.l_f, 0.0);
    EXPECT_GT(c.f_f, 0.0);
    EXPECT_TRUE(std::isfinite(c.u_f) && std::isfinite(c.l_f) && std::isfinite(c.f_f));
    EXPECT_THROW(likelihood_constants(symmetric_quantizer(4, 0.3), 50), InvalidArgument);
}

TEST(Constants, ReflectionSymmetry) {
    const Quantizer q = symmetric_quantizer(4, 0.3);
    const LikelihoodConstants left = likelihood_constants(q, {-1.0, 0.0}, 5001);
    const LikelihoodConstants right = likelihood_constants(q, {0.0, 1.0}, 5001);
    EXPECT_NEAR(left.u_f, right.u_f, 1e-9 * right.u_f);
    EXPECT_NEAR(left.l_f, right.l_f, 1e-9 * right.l_f);
    EXPECT_NEAR(left.f_f, right.f_f, 1e-9 * right.f_f);
}

TEST(Constants, RatiosEventuallyIncreaseWithDither) {
    const auto rows = validate_dither_curve(4, {2.0, 4.0, 8.0}, 2001);
    EXPECT_LT(rows[0].l_over_f, rows[2].l_over_f);
    EXPECT_LT(rows[0].u_over_f, rows[1].u_over_f);
    EXPECT_LT(rows[1].u_over_f, rows[2].u_over_f);
}

TEST(Constants, DitherCurveHasInteriorMinimum) {
    const auto rows = validate_dither_curve(4, log_grid(0.05, 5.0, 20));
    std::vector<double> l, u;
    for (const auto &r : rows) {
        l.push_back(r.l_over_f);
        u.push_back(r.u_over_f);
    }
    EXPECT_TRUE(has_interior_minimum(l));
    EXPECT_TRUE(has_interior_minimum(u));
    const double lmin = *std::min_element(l.begin(), l.end()), umin = *std::min_element(u.begin(), u.end());
    EXPECT_GT(l.front(), lmin);
    EXPECT_GT(l.back(), lmin);
    EXPECT_GT(u.front(), umin);
    EXPECT_GT(u.back(), umin);
}

TEST(Constants, DitherCurveStableUnderGridRefinement) {
    const auto sig = log_grid(0.05, 5.0, 20);
    const auto coarse = validate_dither_curve(4, sig, 10001);
    const auto fine = validate_dither_curve(4, sig, 20001);
    for (std::size_t i = 0; i < sig.size(); ++i) {
        EXPECT_LT(std::abs(fine[i].l_over_f / coarse[i].l_over_f - 1.0), 0.01) << sig[i];
        EXPECT_LT(std::abs(fine[i].u_over_f / coarse[i].u_over_f - 1.0), 0.01) << sig[i];
    }
}

TEST(QuantizerRecord, JsonRoundTrip) {
    const Quantizer q = symmetric_quantizer(8, 0.123);
    EXPECT_EQ(quantizer_from_json(nlohmann::json::parse(to_json(q).dump())), q);
    nlohmann::json bad = to_json(q);
    bad["num_levels"] = 5;
    EXPECT_THROW(quantizer_from_json(bad), InvalidArgument);
}

TEST(Gaussian, TruncatedMeanMatchesQuadrature) {
    // E[Z | a < Z < b] for standard normal Z.
    const double a = -0.3, b = 1.7;
    const int n = 20000;
    const double h = (b - a) / n;
    double num = 0.0, den = 0.0;
    for (int i = 0; i <= n; ++i) {
        const double t = a + i * h;
        const double w = (i == 0 || i == n) ? 1.0 : (i % 2 ? 4.0 : 2.0);
        num += w * t * gauss::pdf(t);
        den += w * gauss::pdf(t);
    }
    EXPECT_NEAR(gauss::truncated_mean(a, b), num / den, 1e-10);
    EXPECT_NEAR(gauss::truncated_mean(-gauss::inf, gauss::inf), 0.0, 1e-15);
    EXPECT_NEAR(gauss::truncated_mean(40.0, gauss::inf), 40.0, 0.05);
}

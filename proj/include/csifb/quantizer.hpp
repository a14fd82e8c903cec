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

#ifndef CSIFB_QUANTIZER_HPP
#define CSIFB_QUANTIZER_HPP

#include "common.hpp"
#include "gaussian.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <span>
#include <vector>

namespace csifb {

using LevelIndex = int;

/// Uniform Q-level scalar quantizer with Gaussian dither. Cells are half-open
/// [lower, upper); the two outer cells extend to -inf / +inf so every real maps
/// to exactly one cell and the dithered likelihood stays proper.
class Quantizer {
  public:
    Quantizer() = default;

    /// `boundaries` are the Q-1 interior cell edges, strictly increasing.
    Quantizer(std::vector<double> levels, std::vector<double> boundaries, double dither_sigma,
              double range_low, double range_high)
        : levels_(std::move(levels)), interior_(std::move(boundaries)), dither_sigma_(dither_sigma),
          range_low_(range_low), range_high_(range_high) {
        require(levels_.size() >= 2, "Quantizer: need at least 2 levels");
        require(interior_.size() + 1 == levels_.size(), "Quantizer: need Q-1 interior boundaries");
        require(dither_sigma_ > 0.0 && std::isfinite(dither_sigma_), "Quantizer: dither sigma must be > 0");
        require(std::is_sorted(interior_.begin(), interior_.end()) &&
                    std::adjacent_find(interior_.begin(), interior_.end()) == interior_.end(),
                "Quantizer: boundaries must be strictly increasing");
        for (std::size_t i = 0; i < levels_.size(); ++i)
            require(levels_[i] >= lower(static_cast<int>(i)) && levels_[i] < upper(static_cast<int>(i)),
                    "Quantizer: level outside its cell");
    }

    int num_levels() const { return static_cast<int>(levels_.size()); }
    const std::vector<double> &levels() const { return levels_; }
    const std::vector<double> &interior_boundaries() const { return interior_; }
    double dither_sigma() const { return dither_sigma_; }
    double range_low() const { return range_low_; }
    double range_high() const { return range_high_; }

    double lower(int r) const { return r == 0 ? -gauss::inf : interior_[static_cast<std::size_t>(r - 1)]; }
    double upper(int r) const {
        return r == num_levels() - 1 ? gauss::inf : interior_[static_cast<std::size_t>(r)];
    }

    // Width of the finite cells.
    double cell_width() const {
        return interior_.size() >= 2 ? interior_[1] - interior_[0] : (range_high_ - range_low_) / 2.0;
    }

    int bits_per_index() const {
        int b = 0;
        while ((1 << b) < num_levels())
            ++b;
        return b;
    }

    bool operator==(const Quantizer &) const = default;

  private:
    std::vector<double> levels_;
    std::vector<double> interior_;
    double dither_sigma_ = 1.0;
    double range_low_ = 0.0;
    double range_high_ = 0.0;
};

inline constexpr double default_dither_fraction = 0.25;

/// Q equal-width cells spanning [min(samples), max(samples)]; levels at the
/// centres of those cells; dither sigma = dither_fraction * max |sample|.
inline Quantizer calibrate(std::span<const double> samples, int num_levels,
                           double dither_fraction = default_dither_fraction) {
    require(num_levels >= 2, "calibrate: need Q >= 2");
    require(!samples.empty(), "calibrate: no samples");
    require(dither_fraction > 0.0, "calibrate: dither fraction must be > 0");
    const auto [mn, mx] = std::minmax_element(samples.begin(), samples.end());
    const double lo = *mn, hi = *mx;
    require(std::isfinite(lo) && std::isfinite(hi) && hi > lo, "calibrate: degenerate samples (max <= min)");

    const double w = (hi - lo) / num_levels;
    std::vector<double> bounds(static_cast<std::size_t>(num_levels - 1));
    for (int i = 1; i < num_levels; ++i)
        bounds[static_cast<std::size_t>(i - 1)] = lo + i * w;
    std::vector<double> levels(static_cast<std::size_t>(num_levels));
    for (int i = 0; i < num_levels; ++i)
        levels[static_cast<std::size_t>(i)] = lo + (i + 0.5) * w;
    const double amp = std::max(std::abs(lo), std::abs(hi));
    return Quantizer(std::move(levels), std::move(bounds), dither_fraction * amp, lo, hi);
}

/// Index of the cell containing x + dither (ties at a boundary go to the upper cell).
inline LevelIndex quantize(double x, double dither, const Quantizer &q) {
    const auto &b = q.interior_boundaries();
    return static_cast<LevelIndex>(std::upper_bound(b.begin(), b.end(), x + dither) - b.begin());
}

inline double log_cell_prob(LevelIndex r, double x, const Quantizer &q, double sigma) {
    return gauss::log_interval_mass((q.lower(r) - x) / sigma, (q.upper(r) - x) / sigma);
}

/// f_r(x) = Phi((upper - x)/sigma) - Phi((lower - x)/sigma).
inline double cell_prob(LevelIndex r, double x, const Quantizer &q, double sigma) {
    return std::exp(log_cell_prob(r, x, q, sigma));
}

inline double cell_prob(LevelIndex r, double x, const Quantizer &q) {
    require(r >= 0 && r < q.num_levels(), "cell_prob: index out of range");
    return cell_prob(r, x, q, q.dither_sigma());
}

/// f_r'(x) / f_r(x).
inline double cell_log_slope(LevelIndex r, double x, const Quantizer &q, double sigma) {
    return gauss::truncated_mean((q.lower(r) - x) / sigma, (q.upper(r) - x) / sigma) / sigma;
}

/// f_r'(x)^2 / f_r(x).
inline double cell_fisher(LevelIndex r, double x, const Quantizer &q, double sigma) {
    return gauss::squared_density_gap_over_mass((q.lower(r) - x) / sigma, (q.upper(r) - x) / sigma) /
           (sigma * sigma);
}

// -log f_r(x) with the probability floored at 1e-300.
inline double cell_nll(LevelIndex r, double x, const Quantizer &q, double sigma) {
    return -std::max(log_cell_prob(r, x, q, sigma), gauss::log_prob_floor);
}

inline void check_nll_args(std::span<const LevelIndex> r, const RVector &x, const RVector &sigmas,
                           const Quantizer &q) {
    require(static_cast<Eigen::Index>(r.size()) == x.size() && x.size() == sigmas.size(),
            "neg_log_likelihood: r, x and sigmas must have equal length");
    for (auto ri : r)
        require(ri >= 0 && ri < q.num_levels(), "neg_log_likelihood: level index out of range");
}

/// Sum over measurements of -log f_{r_i}(x_i; sigma_i).
inline double nll_sum(std::span<const LevelIndex> r, const RVector &x, const RVector &sigmas,
                      const Quantizer &q) {
    double s = 0.0;
    for (Eigen::Index i = 0; i < x.size(); ++i)
        s += cell_nll(r[static_cast<std::size_t>(i)], x[i], q, sigmas[i]);
    return s;
}

/// (1/R) sum_i -log f_{r_i}(x_i), per-measurement sigma_i overriding the quantizer's dither.
inline double neg_log_likelihood(std::span<const LevelIndex> r, const RVector &x, const RVector &sigmas,
                                 const Quantizer &q) {
    check_nll_args(r, x, sigmas, q);
    require((sigmas.array() > 0.0).all(), "neg_log_likelihood: sigmas must be positive");
    require(x.size() > 0, "neg_log_likelihood: empty input");
    return nll_sum(r, x, sigmas, q) / static_cast<double>(x.size());
}

/// Gradient of nll_sum with respect to x.
inline RVector nll_sum_gradient(std::span<const LevelIndex> r, const RVector &x, const RVector &sigmas,
                                const Quantizer &q) {
    RVector g(x.size());
    for (Eigen::Index i = 0; i < x.size(); ++i)
        g[i] = -cell_log_slope(r[static_cast<std::size_t>(i)], x[i], q, sigmas[i]);
    return g;
}

/// Gradient of neg_log_likelihood (the averaged form) with respect to x.
inline RVector neg_log_likelihood_gradient(std::span<const LevelIndex> r, const RVector &x,
                                           const RVector &sigmas, const Quantizer &q) {
    check_nll_args(r, x, sigmas, q);
    return nll_sum_gradient(r, x, sigmas, q) / static_cast<double>(x.size());
}

// ---------------------------------------------------------------------------

struct EvalDomain {
    double low;
    double high;
};

struct LikelihoodConstants {
    double u_f;          // max -log f_r(x)
    double l_f;          // max |f_r'(x) / f_r(x)|
    double f_f;          // min over x of max_r f_r'(x)^2 / f_r(x)
    EvalDomain eval_domain;
    int grid_points;
};

inline constexpr int default_constants_grid = 10001;

/// Grid evaluation of U_f, L_f, F_f for the dithered quantizer on a bounded domain.
inline LikelihoodConstants likelihood_constants(const Quantizer &q, EvalDomain domain,
                                                int grid_points = default_constants_grid) {
    require(grid_points >= 100, "likelihood_constants: need at least 100 grid points");
    require(domain.high > domain.low, "likelihood_constants: empty domain");
    const double sigma = q.dither_sigma();
    double u = 0.0, l = 0.0, f = gauss::inf;
    for (int g = 0; g < grid_points; ++g) {
        const double x = domain.low + (domain.high - domain.low) * g / (grid_points - 1);
        double best_fisher = 0.0;
        for (int r = 0; r < q.num_levels(); ++r) {
            u = std::max(u, cell_nll(r, x, q, sigma));
            l = std::max(l, std::abs(cell_log_slope(r, x, q, sigma)));
            best_fisher = std::max(best_fisher, cell_fisher(r, x, q, sigma));
        }
        f = std::min(f, best_fisher);
    }
    return {u, l, f, domain, grid_points};
}

inline LikelihoodConstants likelihood_constants(const Quantizer &q, int grid_points = default_constants_grid) {
    return likelihood_constants(q, {q.range_low(), q.range_high()}, grid_points);
}

// ---------------------------------------------------------------------------
// Text record shared by the UE and BS sides.

inline nlohmann::json to_json(const Quantizer &q) {
    return {{"num_levels", q.num_levels()},
            {"levels", q.levels()},
            {"boundaries", q.interior_boundaries()},
            {"dither_sigma", q.dither_sigma()},
            {"range", {q.range_low(), q.range_high()}}};
}

inline Quantizer quantizer_from_json(const nlohmann::json &j) {
    try {
        auto levels = j.at("levels").get<std::vector<double>>();
        auto bounds = j.at("boundaries").get<std::vector<double>>();
        const auto range = j.at("range").get<std::vector<double>>();
        require(range.size() == 2, "quantizer record: range must have two entries");
        if (j.contains("num_levels"))
            require(j.at("num_levels").get<int>() == static_cast<int>(levels.size()),
                    "quantizer record: num_levels disagrees with levels");
        return Quantizer(std::move(levels), std::move(bounds), j.at("dither_sigma").get<double>(), range[0],
                         range[1]);
    } catch (const nlohmann::json::exception &e) {
        throw InvalidArgument(std::string("quantizer record: ") + e.what());
    }
}

} // namespace csifb

#endif

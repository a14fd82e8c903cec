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

#ifndef CSIFB_GAUSSIAN_HPP
#define CSIFB_GAUSSIAN_HPP

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace csifb::gauss {

inline constexpr double inf = std::numeric_limits<double>::infinity();
inline constexpr double prob_floor = 1e-300;
inline const double log_prob_floor = std::log(prob_floor);

inline constexpr double inv_sqrt2 = 0.70710678118654752440;
inline constexpr double log_sqrt_2pi = 0.91893853320467274178;

inline double pdf(double x) {
    if (std::isinf(x))
        return 0.0;
    return std::exp(-0.5 * x * x - log_sqrt_2pi);
}

inline double log_pdf(double x) { return -0.5 * x * x - log_sqrt_2pi; }

inline double cdf(double x) { return 0.5 * std::erfc(-x * inv_sqrt2); }

// Upper tail 1 - Phi(x), accurate for large positive x.
inline double sf(double x) { return 0.5 * std::erfc(x * inv_sqrt2); }

/// log(1 - Phi(x)). erfc is used while it has range; beyond that the
/// asymptotic Mills-ratio series takes over (relative error < 1e-17 at x = 25).
inline double log_sf(double x) {
    if (x == inf)
        return -inf;
    if (x < -5.0)
        return std::log1p(-cdf(x));
    if (x < 25.0)
        return std::log(sf(x));
    const double z = 1.0 / (x * x);
    const double series = 1.0 - z * (1.0 - 3.0 * z * (1.0 - 5.0 * z * (1.0 - 7.0 * z * (1.0 - 9.0 * z))));
    return log_pdf(x) - std::log(x) + std::log(series);
}

inline double log_cdf(double x) { return log_sf(-x); }

/// log(Phi(b) - Phi(a)) for a < b, either end may be infinite. Each tail is
/// handled on its own side so the difference never cancels catastrophically.
inline double log_interval_mass(double a, double b) {
    if (!(a < b))
        return -inf;
    if (a >= 0.0) {
        const double la = log_sf(a);
        const double lb = log_sf(b);
        return la + std::log1p(-std::exp(lb - la));
    }
    if (b <= 0.0) {
        const double la = log_cdf(a);
        const double lb = log_cdf(b);
        return lb + std::log1p(-std::exp(la - lb));
    }
    // Straddles zero: erf differences are well conditioned here.
    const double mass = 0.5 * (std::erf(b * inv_sqrt2) - std::erf(a * inv_sqrt2));
    return std::log(mass);
}

inline double interval_mass(double a, double b) { return std::exp(log_interval_mass(a, b)); }

/// (phi(a) - phi(b)) / (Phi(b) - Phi(a)): mean of a standard normal truncated to (a, b).
inline double truncated_mean(double a, double b) {
    const double lz = log_interval_mass(a, b);
    if (lz == -inf) {
        // Empty interval numerically: mean sits at the nearer endpoint.
        return (std::abs(a) < std::abs(b)) ? a : b;
    }
    const double ta = std::isinf(a) ? 0.0 : std::exp(log_pdf(a) - lz);
    const double tb = std::isinf(b) ? 0.0 : std::exp(log_pdf(b) - lz);
    return ta - tb;
}

/// (phi(a) - phi(b))^2 / (Phi(b) - Phi(a)), evaluated in log space.
inline double squared_density_gap_over_mass(double a, double b) {
    const double lz = log_interval_mass(a, b);
    const double pa = pdf(a), pb = pdf(b);
    const double gap = pa - pb;
    if (gap == 0.0)
        return 0.0;
    return std::exp(2.0 * std::log(std::abs(gap)) - std::max(lz, log_prob_floor));
}

} // namespace csifb::gauss

#endif

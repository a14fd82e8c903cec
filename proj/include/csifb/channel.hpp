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

#ifndef CSIFB_CHANNEL_HPP
#define CSIFB_CHANNEL_HPP

#include "common.hpp"

#include <algorithm>
#include <cmath>
#include <utility>
#include <vector>

namespace csifb {

/// Antenna arrays and path budget of one BS/UE link. Both ends are ULAs with the
/// same element spacing, given as a fraction of the carrier wavelength.
struct ArrayConfig {
    int num_tx = 32;            // N, BS antennas
    int num_rx = 16;            // M, UE antennas
    double spacing_ratio = 0.5; // d / lambda
    int num_paths = 6;          // K
    double amp_max = 1.0;       // kappa, bound on |beta_k|

    void validate() const {
        require(num_tx >= 1, "num_tx must be >= 1");
        require(num_rx >= 1, "num_rx must be >= 1");
        require(spacing_ratio > 0.0, "spacing_ratio must be > 0");
        require(num_paths >= 1, "num_paths must be >= 1");
        require(amp_max > 0.0, "amp_max must be > 0");
    }
};

/// Path angles (radians) and complex gains of a K-path double-directional channel.
struct ChannelParams {
    std::vector<double> aoa;   // theta_k, UE side
    std::vector<double> aod;   // phi_k, BS side
    std::vector<cplx> gains;   // beta_k

    ChannelParams() = default;
    explicit ChannelParams(std::size_t k) : aoa(k, 0.0), aod(k, 0.0), gains(k, cplx{}) {}

    std::size_t size() const { return gains.size(); }

    bool consistent() const { return aoa.size() == gains.size() && aod.size() == gains.size(); }
};

using ChannelMatrix = CMatrix;

/// Lossless real views of a complex M x N channel.
struct RealEmbedding {
    RVector stacked_vec; // vec([Re H; Im H]), length 2MN
    RVector block_vec;   // vec([[Re H, -Im H]; [Im H, Re H]]), length 4MN
};

inline double spatial_frequency(double angle, double spacing_ratio) {
    return 2.0 * pi * spacing_ratio * std::sin(angle);
}

// Principal-value inverse of spatial_frequency. Frequencies outside the visible
// region of a sparse array are clamped to endfire.
inline double angle_from_frequency(double omega, double spacing_ratio) {
    const double s = omega / (2.0 * pi * spacing_ratio);
    return std::asin(std::clamp(s, -1.0, 1.0));
}

// Wraps to (-pi, pi].
inline double wrap_frequency(double omega) {
    double w = std::remainder(omega, 2.0 * pi);
    if (w <= -pi)
        w += 2.0 * pi;
    return w;
}

/// Array response with linear phase progression, element m = exp(-j * omega * m).
inline CVector steering_from_frequency(double omega, int num_antennas) {
    CVector a(num_antennas);
    for (int m = 0; m < num_antennas; ++m)
        a[m] = std::polar(1.0, -omega * m);
    return a;
}

/// ULA steering vector: element m = exp(-j 2 pi (d/lambda) sin(angle) m).
inline CVector steering_vector(double angle, int num_antennas, double spacing_ratio) {
    require(num_antennas >= 1, "steering_vector: num_antennas must be >= 1");
    return steering_from_frequency(spatial_frequency(angle, spacing_ratio), num_antennas);
}

/// H = sum_k beta_k a_r(theta_k) a_t(phi_k)^H. No check on K, used by the solver
/// when the assumed path count differs from the configured one.
inline ChannelMatrix synthesize_channel(const ChannelParams &z, int num_rx, int num_tx,
                                        double spacing_ratio) {
    require(z.consistent(), "synthesize_channel: aoa/aod/gains length mismatch");
    ChannelMatrix h = ChannelMatrix::Zero(num_rx, num_tx);
    for (std::size_t k = 0; k < z.size(); ++k) {
        if (z.gains[k] == cplx{})
            continue;
        const CVector ar = steering_vector(z.aoa[k], num_rx, spacing_ratio);
        const CVector at = steering_vector(z.aod[k], num_tx, spacing_ratio);
        h.noalias() += z.gains[k] * ar * at.adjoint();
    }
    return h;
}

inline ChannelMatrix synthesize_channel(const ChannelParams &z, const ArrayConfig &cfg) {
    cfg.validate();
    require(static_cast<int>(z.size()) == cfg.num_paths,
            "synthesize_channel: params carry " + std::to_string(z.size()) + " paths, config expects " +
                std::to_string(cfg.num_paths));
    return synthesize_channel(z, cfg.num_rx, cfg.num_tx, cfg.spacing_ratio);
}

struct SamplingRange {
    double low;
    double high;
};

inline constexpr SamplingRange default_amp_range{0.5, 1.0};
inline constexpr SamplingRange high_dynamic_amp_range{0.01, 1.0};
inline constexpr SamplingRange default_angle_range{-pi / 2.0, pi / 2.0};

/// Draws K paths: angles i.i.d. uniform on angle_range, |beta| uniform on
/// amp_range, arg(beta) uniform on (0, 2 pi).
inline ChannelParams sample_channel_params(Rng &rng, const ArrayConfig &cfg,
                                           SamplingRange amp_range = default_amp_range,
                                           SamplingRange angle_range = default_angle_range) {
    cfg.validate();
    require(amp_range.low > 0.0 && amp_range.low <= amp_range.high && amp_range.high <= cfg.amp_max,
            "sample_channel_params: need 0 < amp_low <= amp_high <= amp_max");
    require(angle_range.low < angle_range.high && angle_range.low >= -pi / 2.0 && angle_range.high <= pi / 2.0,
            "sample_channel_params: angle range must lie in [-pi/2, pi/2]");

    std::uniform_real_distribution<double> ang(angle_range.low, angle_range.high);
    std::uniform_real_distribution<double> amp(amp_range.low, amp_range.high);
    std::uniform_real_distribution<double> phase(0.0, 2.0 * pi);

    const auto k = static_cast<std::size_t>(cfg.num_paths);
    ChannelParams z(k);
    for (std::size_t i = 0; i < k; ++i) {
        z.aoa[i] = ang(rng);
        z.aod[i] = ang(rng);
        const double a = amp(rng);
        z.gains[i] = std::polar(a, phase(rng));
    }
    return z;
}

// ---------------------------------------------------------------------------
// Real embeddings

inline RVector real_embed_stacked(const ChannelMatrix &h) {
    const Eigen::Index m = h.rows(), n = h.cols();
    RVector v(2 * m * n);
    for (Eigen::Index j = 0; j < n; ++j) {
        v.segment(2 * m * j, m) = h.col(j).real();
        v.segment(2 * m * j + m, m) = h.col(j).imag();
    }
    return v;
}

inline ChannelMatrix un_embed_stacked(const RVector &v, Eigen::Index m, Eigen::Index n) {
    require(v.size() == 2 * m * n, "un_embed_stacked: length must be 2MN");
    ChannelMatrix h(m, n);
    for (Eigen::Index j = 0; j < n; ++j)
        for (Eigen::Index i = 0; i < m; ++i)
            h(i, j) = cplx(v[2 * m * j + i], v[2 * m * j + m + i]);
    return h;
}

inline RMatrix real_block_matrix(const ChannelMatrix &h) {
    const Eigen::Index m = h.rows(), n = h.cols();
    RMatrix b(2 * m, 2 * n);
    b.topLeftCorner(m, n) = h.real();
    b.topRightCorner(m, n) = -h.imag();
    b.bottomLeftCorner(m, n) = h.imag();
    b.bottomRightCorner(m, n) = h.real();
    return b;
}

inline std::pair<RMatrix, RVector> real_embed_block(const ChannelMatrix &h) {
    RMatrix b = real_block_matrix(h);
    RVector v = Eigen::Map<const RVector>(b.data(), b.size());
    return {std::move(b), std::move(v)};
}

// Reads the left block column; the right one is redundant.
inline ChannelMatrix un_embed_block(const RVector &v, Eigen::Index m, Eigen::Index n) {
    require(v.size() == 4 * m * n, "un_embed_block: length must be 4MN");
    const Eigen::Map<const RMatrix> b(v.data(), 2 * m, 2 * n);
    ChannelMatrix h(m, n);
    for (Eigen::Index j = 0; j < n; ++j)
        for (Eigen::Index i = 0; i < m; ++i)
            h(i, j) = cplx(b(i, j), b(m + i, j));
    return h;
}

inline RealEmbedding real_embed(const ChannelMatrix &h) {
    return {real_embed_stacked(h), real_embed_block(h).second};
}

/// Closed-form upper bound on the Lipschitz constant of z -> G(z):
/// sqrt(KMN) * sqrt(1 + (2 pi (d/lambda) kappa)^2 (M^2 + N^2)).
inline double lipschitz_bound(const ArrayConfig &cfg) {
    cfg.validate();
    const double k = cfg.num_paths, m = cfg.num_rx, n = cfg.num_tx;
    const double c = 2.0 * pi * cfg.spacing_ratio * cfg.amp_max;
    return std::sqrt(k * m * n) * std::sqrt(1.0 + c * c * (m * m + n * n));
}

/// Upper bound on ||H||_F for admissible parameters: K sqrt(MN) kappa.
inline double frobenius_bound(const ArrayConfig &cfg) {
    return cfg.num_paths * std::sqrt(static_cast<double>(cfg.num_rx) * cfg.num_tx) * cfg.amp_max;
}

} // namespace csifb

#endif

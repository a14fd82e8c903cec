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

#ifndef CSIFB_GD_BASELINE_HPP
#define CSIFB_GD_BASELINE_HPP

#include "feedback.hpp"
#include "quantizer.hpp"

#include <cmath>
#include <vector>

namespace csifb {

struct GdResult {
    ChannelParams params;
    ChannelMatrix channel;
    std::vector<double> objective_history; // entry 0 is the starting objective
};

namespace detail {

inline double gd_objective(const FeedbackPayload &p, const MeasurementOperator &op, const Quantizer &q,
                           const ChannelParams &z, double spacing_ratio) {
    const ChannelMatrix h = synthesize_channel(z, p.num_rx, p.num_tx, spacing_ratio);
    return nll_sum(p.indices, op.rows * real_embed_stacked(h), op.sigmas, q);
}

} // namespace detail

/// Gradient of -log p(r | G(z)) with respect to z, flattened per path as
/// (theta_k, phi_k, Re beta_k, Im beta_k).
inline RVector gd_gradient(const FeedbackPayload &p, const MeasurementOperator &op, const Quantizer &q,
                           const ChannelParams &z, double spacing_ratio) {
    const int m = p.num_rx, n = p.num_tx;
    const ChannelMatrix h = synthesize_channel(z, m, n, spacing_ratio);
    const RVector gx = nll_sum_gradient(p.indices, op.rows * real_embed_stacked(h), op.sigmas, q);
    // dF = Re <G_H, dH> with G_H = dF/dRe H + j dF/dIm H.
    const CMatrix gh = un_embed_stacked(op.rows.transpose() * gx, m, n);
    const double kd = 2.0 * pi * spacing_ratio;

    RVector grad(4 * static_cast<Eigen::Index>(z.size()));
    for (std::size_t k = 0; k < z.size(); ++k) {
        const CVector ar = steering_vector(z.aoa[k], m, spacing_ratio);
        const CVector at = steering_vector(z.aod[k], n, spacing_ratio);
        CVector dar(m), dat(n);
        const double wr = kd * std::cos(z.aoa[k]), wt = kd * std::cos(z.aod[k]);
        for (int i = 0; i < m; ++i)
            dar[i] = cplx(0.0, -wr * i) * ar[i];
        for (int j = 0; j < n; ++j)
            dat[j] = cplx(0.0, -wt * j) * at[j];
        const cplx beta = z.gains[k];
        const CVector gh_at = gh * at;
        const cplx p0 = ar.dot(gh_at); // a_r^H G_H a_t
        const auto idx = static_cast<Eigen::Index>(4 * k);
        // For dH = c x y^H the directional derivative is Re(conj(c) x^H G_H y).
        grad[idx] = (std::conj(beta) * dar.dot(gh_at)).real();
        grad[idx + 1] = (std::conj(beta) * ar.dot(gh * dat)).real();
        grad[idx + 2] = p0.real();
        grad[idx + 3] = p0.imag();
    }
    return grad;
}

inline ChannelParams step_params(const ChannelParams &z, const RVector &dir, double alpha) {
    ChannelParams out = z;
    for (std::size_t k = 0; k < z.size(); ++k) {
        const auto idx = static_cast<Eigen::Index>(4 * k);
        out.aoa[k] += alpha * dir[idx];
        out.aod[k] += alpha * dir[idx + 1];
        out.gains[k] += alpha * cplx(dir[idx + 2], dir[idx + 3]);
    }
    return out;
}

/// Plain gradient descent on -log p(r | G(z)) over (theta, phi, Re beta, Im beta).
/// Each iteration starts from `step_size` and halves it until the objective
/// decreases; the run stops early when no decreasing step is found.
inline GdResult gd_baseline(const FeedbackPayload &payload, const MeasurementOperator &op, const Quantizer &q,
                            int num_paths, double spacing_ratio, double step_size, int max_iters,
                            const ChannelParams *init = nullptr) {
    payload.validate();
    require(num_paths >= 1, "gd_baseline: K must be >= 1");
    require(step_size > 0.0 && max_iters >= 0, "gd_baseline: bad step size or iteration budget");
    require(op.measurements() == payload.measurements(), "gd_baseline: operator rows must match payload length");

    ChannelParams z = init ? *init : ChannelParams(static_cast<std::size_t>(num_paths));
    require(static_cast<int>(z.size()) == num_paths && z.consistent(), "gd_baseline: init has the wrong size");
    GdResult out;
    double f = detail::gd_objective(payload, op, q, z, spacing_ratio);
    out.objective_history.push_back(f);

    for (int it = 0; it < max_iters; ++it) {
        const RVector g = gd_gradient(payload, op, q, z, spacing_ratio);
        if (!g.allFinite())
            throw NumericalError("gd_baseline: non-finite gradient");
        double alpha = step_size;
        bool accepted = false;
        for (int h = 0; h < 40; ++h, alpha *= 0.5) {
            ChannelParams trial = step_params(z, -g, alpha);
            const double ft = detail::gd_objective(payload, op, q, trial, spacing_ratio);
            if (ft < f) {
                z = std::move(trial);
                f = ft;
                accepted = true;
                break;
            }
        }
        if (!accepted)
            break;
        out.objective_history.push_back(f);
    }

    // sin(angle) is all that matters; report principal values.
    for (std::size_t k = 0; k < z.size(); ++k) {
        z.aoa[k] = std::asin(std::sin(z.aoa[k]));
        z.aod[k] = std::asin(std::sin(z.aod[k]));
    }
    out.channel = synthesize_channel(z, payload.num_rx, payload.num_tx, spacing_ratio);
    out.params = std::move(z);
    return out;
}

} // namespace csifb

#endif

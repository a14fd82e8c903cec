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

#ifndef CSIFB_RELAX_HPP
#define CSIFB_RELAX_HPP

#include "channel.hpp"
#include "fft2d.hpp"
#include "solver_config.hpp"

#include <cmath>
#include <vector>

namespace csifb {

/// One 2D harmonic a_r(omega_r) a_t(omega_t)^H scaled by beta, in spatial-frequency
/// coordinates omega = 2 pi (d/lambda) sin(angle).
struct Harmonic {
    double omega_r = 0.0;
    double omega_t = 0.0;
    cplx beta{};
};

struct HrValue {
    double value;       // |a_r^H Z a_t|^2
    double d_first;     // derivative w.r.t. the receive-side coordinate
    double d_second;    // derivative w.r.t. the transmit-side coordinate
    cplx inner;         // a_r^H Z a_t
};

/// Matched-filter power f = |a_r(omega_r)^H Z a_t(omega_t)|^2 and its gradient
/// in spatial-frequency coordinates.
inline HrValue hr_objective_freq(double omega_r, double omega_t, const CMatrix &z) {
    const Eigen::Index m = z.rows(), n = z.cols();
    CVector at(n), dat(n);
    for (Eigen::Index j = 0; j < n; ++j) {
        at[j] = std::polar(1.0, -omega_t * j);
        dat[j] = cplx(0.0, -static_cast<double>(j)) * at[j];
    }
    const CVector u = z * at;
    const CVector du = z * dat;
    cplx c{}, dc_r{}, dc_t{};
    for (Eigen::Index i = 0; i < m; ++i) {
        const cplx e = std::polar(1.0, omega_r * i); // conj(a_r)_i
        c += e * u[i];
        dc_r += cplx(0.0, static_cast<double>(i)) * e * u[i];
        dc_t += e * du[i];
    }
    const cplx cc = std::conj(c);
    return {std::norm(c), 2.0 * (cc * dc_r).real(), 2.0 * (cc * dc_t).real(), c};
}

struct HrObjective {
    double value;
    double d_theta;
    double d_phi;
};

/// f(theta, phi) = |a_r(theta)^H Z a_t(phi)|^2 with its partials in the angle domain.
inline HrObjective hr_objective_and_grad(double theta, double phi, const CMatrix &zeta_i, double spacing_ratio) {
    const double k = 2.0 * pi * spacing_ratio;
    const HrValue v = hr_objective_freq(k * std::sin(theta), k * std::sin(phi), zeta_i);
    return {v.value, v.d_first * k * std::cos(theta), v.d_second * k * std::cos(phi)};
}

inline CMatrix harmonic_matrix(const Harmonic &h, Eigen::Index m, Eigen::Index n) {
    return h.beta * steering_from_frequency(h.omega_r, static_cast<int>(m)) *
           steering_from_frequency(h.omega_t, static_cast<int>(n)).adjoint();
}

namespace detail {

// Coarse peak of |a_r^H Z a_t|^2 over the zero-padded DFT grid. F(k, l) of the
// padded array equals a_r^H Z a_t at omega_r = -2 pi k / P, omega_t = 2 pi l / L.
// Ties go to the lowest column-major index.
inline std::pair<double, double> fft_peak(const CMatrix &z, int oversample) {
    const Eigen::Index p = oversample * z.rows(), l = oversample * z.cols();
    const CMatrix &f = thread_fft(p, l).padded_transform(z);
    double best = -1.0;
    Eigen::Index bk = 0, bl = 0;
    for (Eigen::Index c = 0; c < l; ++c)
        for (Eigen::Index r = 0; r < p; ++r) {
            const double v = std::norm(f(r, c));
            if (v > best) {
                best = v;
                bk = r;
                bl = c;
            }
        }
    return {wrap_frequency(-2.0 * pi * static_cast<double>(bk) / static_cast<double>(p)),
            wrap_frequency(2.0 * pi * static_cast<double>(bl) / static_cast<double>(l))};
}

// Gradient ascent on the matched-filter power. Steps are scaled by the peak
// curvature of a single harmonic, f (M^2 - 1) / 6, and halved until the
// objective increases.
inline HrValue refine_peak(double &omega_r, double &omega_t, const CMatrix &z, int max_steps) {
    const double m = static_cast<double>(z.rows()), n = static_cast<double>(z.cols());
    const double curv_r = (m * m - 1.0) / 6.0, curv_t = (n * n - 1.0) / 6.0;
    HrValue cur = hr_objective_freq(omega_r, omega_t, z);
    for (int it = 0; it < max_steps; ++it) {
        if (cur.value <= 0.0)
            break;
        const double dr = curv_r > 0.0 ? cur.d_first / (cur.value * curv_r) : 0.0;
        const double dt = curv_t > 0.0 ? cur.d_second / (cur.value * curv_t) : 0.0;
        if (std::abs(dr) + std::abs(dt) < 1e-13)
            break;
        double alpha = 1.0;
        bool moved = false;
        for (int h = 0; h <= 20; ++h, alpha *= 0.5) {
            const double tr = omega_r + alpha * dr, tt = omega_t + alpha * dt;
            const HrValue trial = hr_objective_freq(tr, tt, z);
            if (trial.value > cur.value) {
                omega_r = tr;
                omega_t = tt;
                cur = trial;
                moved = true;
                break;
            }
        }
        if (!moved)
            break;
    }
    omega_r = wrap_frequency(omega_r);
    omega_t = wrap_frequency(omega_t);
    return cur;
}

inline double param_distance(const std::vector<Harmonic> &a, const std::vector<Harmonic> &b, std::size_t count,
                             double &norm_b) {
    double d2 = 0.0, n2 = 0.0;
    for (std::size_t i = 0; i < count; ++i) {
        d2 += std::norm(a[i].beta - b[i].beta);
        const double dr = wrap_frequency(a[i].omega_r - b[i].omega_r);
        const double dt = wrap_frequency(a[i].omega_t - b[i].omega_t);
        d2 += dr * dr + dt * dt;
        n2 += std::norm(b[i].beta) + b[i].omega_r * b[i].omega_r + b[i].omega_t * b[i].omega_t;
    }
    norm_b = std::sqrt(n2);
    return std::sqrt(d2);
}

} // namespace detail

/// RELAX with continuous refinement: components are added one at a time; after
/// each addition all current components are re-estimated by block coordinate
/// descent, each update being a 2D-FFT grid search on the residual with that
/// component restored, followed by gradient ascent and the closed-form gain.
inline std::vector<Harmonic> mod_relax_harmonics(const CMatrix &zeta, int num_paths, const SolverConfig &cfg) {
    require(num_paths >= 1, "mod_relax: K must be >= 1");
    cfg.validate();
    const Eigen::Index m = zeta.rows(), n = zeta.cols();
    const double mn = static_cast<double>(m * n);
    std::vector<Harmonic> comps(static_cast<std::size_t>(num_paths));
    CMatrix residual = zeta;

    for (std::size_t eta = 1; eta <= comps.size(); ++eta) {
        const int cycles = eta == 1 ? 1 : cfg.relax_bcd_max;
        for (int cycle = 0; cycle < cycles; ++cycle) {
            const std::vector<Harmonic> before(comps.begin(), comps.begin() + static_cast<long>(eta));
            for (std::size_t idx = 0; idx < eta; ++idx) {
                // The newly added component goes first in its opening cycle.
                const std::size_t i = cycle == 0 ? (idx + eta - 1) % eta : idx;
                Harmonic &c = comps[i];
                if (c.beta != cplx{})
                    residual += harmonic_matrix(c, m, n);
                auto [wr, wt] = detail::fft_peak(residual, cfg.fft_oversample);
                const HrValue v = detail::refine_peak(wr, wt, residual, cfg.ga_max);
                c.omega_r = wr;
                c.omega_t = wt;
                c.beta = v.inner / mn;
                if (c.beta != cplx{})
                    residual -= harmonic_matrix(c, m, n);
            }
            if (eta > 1 && cycle > 0) {
                double norm_before = 0.0;
                const double change = detail::param_distance(comps, before, eta, norm_before);
                if (change <= cfg.relax_bcd_tol * norm_before)
                    break;
            }
        }
    }
    return comps;
}

inline ChannelParams harmonics_to_params(const std::vector<Harmonic> &comps, double spacing_ratio) {
    ChannelParams z(comps.size());
    for (std::size_t k = 0; k < comps.size(); ++k) {
        z.aoa[k] = angle_from_frequency(comps[k].omega_r, spacing_ratio);
        z.aod[k] = angle_from_frequency(comps[k].omega_t, spacing_ratio);
        z.gains[k] = comps[k].beta;
    }
    return z;
}

inline CMatrix synthesize_harmonics(const std::vector<Harmonic> &comps, Eigen::Index m, Eigen::Index n) {
    CMatrix h = CMatrix::Zero(m, n);
    for (const auto &c : comps)
        if (c.beta != cplx{})
            h += harmonic_matrix(c, m, n);
    return h;
}

/// K-path least-squares fit of zeta; angles reported as arcsin principal values.
inline ChannelParams mod_relax(const CMatrix &zeta, int num_paths, double spacing_ratio, const SolverConfig &cfg) {
    return harmonics_to_params(mod_relax_harmonics(zeta, num_paths, cfg), spacing_ratio);
}

} // namespace csifb

#endif

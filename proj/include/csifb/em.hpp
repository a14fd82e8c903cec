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

#ifndef CSIFB_EM_HPP
#define CSIFB_EM_HPP

#include "feedback.hpp"
#include "quantizer.hpp"
#include "solver_config.hpp"

#include <span>
#include <vector>

namespace csifb {

/// Factored data of the H-subproblem
///   min_h  sum_i -log f_{r_i}(b_i^T h) + (rho/2) ||h - u||^2
/// with rows whitened by their noise sigma (b_i = op_i / sigma_i), so the
/// per-measurement likelihoods all have unit dither.
///
/// The M-step ridge system (B^T B + rho I) h = B^T g + rho u is solved through
/// the R x R matrix W = rho I + B B^T: the measurement-space iterate obeys
/// x = W^{-1}(G g + rho B u) with G = B B^T, and h = u + B^T (g - x) / rho.
class EmSystem {
  public:
    EmSystem(const MeasurementOperator &op, std::span<const LevelIndex> r, const Quantizer &q, double rho)
        : rho_(rho) {
        require(rho > 0.0, "EmSystem: rho must be > 0");
        require(op.rows.rows() == op.sigmas.size(), "EmSystem: one sigma per measurement row");
        require(static_cast<Eigen::Index>(r.size()) == op.rows.rows(), "EmSystem: payload and operator lengths differ");
        require((op.sigmas.array() > 0.0).all(), "EmSystem: sigmas must be positive");
        b_ = op.rows.array().colwise() / op.sigmas.array();
        gram_ = b_ * b_.transpose();
        RMatrix w = gram_;
        w.diagonal().array() += rho_;
        llt_.compute(w);
        if (llt_.info() != Eigen::Success)
            throw NumericalError("EmSystem: ridge system is not positive definite");
        lower_.resize(op.sigmas.size());
        upper_.resize(op.sigmas.size());
        for (Eigen::Index i = 0; i < op.sigmas.size(); ++i) {
            const LevelIndex ri = r[static_cast<std::size_t>(i)];
            require(ri >= 0 && ri < q.num_levels(), "EmSystem: level index out of range");
            lower_[i] = q.lower(ri) / op.sigmas[i];
            upper_[i] = q.upper(ri) / op.sigmas[i];
        }
    }

    double rho() const { return rho_; }
    const RMatrix &whitened_rows() const { return b_; }
    Eigen::Index measurements() const { return b_.rows(); }
    Eigen::Index dim() const { return b_.cols(); }

    // E-step: posterior mean of the un-dithered whitened measurement given its cell.
    RVector posterior_mean(const RVector &x) const {
        RVector g(x.size());
        for (Eigen::Index i = 0; i < x.size(); ++i)
            g[i] = x[i] + gauss::truncated_mean(lower_[i] - x[i], upper_[i] - x[i]);
        return g;
    }

    double nll(const RVector &x) const {
        double s = 0.0;
        for (Eigen::Index i = 0; i < x.size(); ++i)
            s -= std::max(gauss::log_interval_mass(lower_[i] - x[i], upper_[i] - x[i]), gauss::log_prob_floor);
        return s;
    }

    // M-step in measurement space.
    RVector mstep(const RVector &g, const RVector &bu) const { return llt_.solve(gram_ * g + rho_ * bu); }

    const RMatrix &gram() const { return gram_; }

  private:
    double rho_;
    RMatrix b_;
    RMatrix gram_;
    Eigen::LLT<RMatrix> llt_;
    RVector lower_, upper_;
};

/// Per-iteration record of the EM majorize-minimize sequence.
struct EmTrace {
    std::vector<double> objective; // F(h^j), j = 0 is the starting point u
    std::vector<double> surrogate; // Q_j(h^{j+1}), the majorizer built at h^j
};

/// EM / MM solve of the H-subproblem, started from h = u.
inline RVector em_solve(const EmSystem &sys, const RVector &u, int max_iters, double tol, EmTrace *trace = nullptr) {
    require(u.size() == sys.dim(), "em_solve: u has the wrong length");
    const double rho = sys.rho();
    const RMatrix &b = sys.whitened_rows();
    const RMatrix &gram = sys.gram();
    const RVector bu = b * u;
    const double uu = u.squaredNorm();

    RVector x = bu;
    RVector w = RVector::Zero(bu.size()); // h = u + B^T w / rho
    auto penalty = [&](const RVector &wv) { return 0.5 * wv.dot(gram * wv) / rho; };
    if (trace) {
        trace->objective.clear();
        trace->surrogate.clear();
        trace->objective.push_back(sys.nll(x));
    }

    for (int j = 0; j < max_iters; ++j) {
        const RVector g = sys.posterior_mean(x);
        const RVector x_next = sys.mstep(g, bu);
        const RVector w_next = g - x_next;
        if (trace) {
            // Majorizer at h^j: F(h^j) + sum_i [ (g_i - x_i)^2 - (g_i - x_i^j)^2 ] / 2 + penalty.
            const double base = trace->objective.back() - penalty(w);
            const double quad = 0.5 * ((g - x_next).squaredNorm() - (g - x).squaredNorm());
            trace->surrogate.push_back(base + quad + penalty(w_next));
            trace->objective.push_back(sys.nll(x_next) + penalty(w_next));
        }
        const RVector dw = w_next - w;
        const double dh2 = dw.dot(gram * dw) / (rho * rho);
        const double h2 = uu + 2.0 * bu.dot(w_next) / rho + w_next.dot(gram * w_next) / (rho * rho);
        x = x_next;
        w = w_next;
        if (dh2 <= tol * tol * h2)
            break;
    }
    RVector h = u + b.transpose() * w / rho;
    if (!h.allFinite())
        throw NumericalError("em_solve: non-finite iterate");
    return h;
}

/// One-shot form: factors the system for this call only.
inline RVector em_solve(std::span<const LevelIndex> r, const MeasurementOperator &op, const RVector &u, double rho,
                        const Quantizer &q, const SolverConfig &cfg, EmTrace *trace = nullptr) {
    const EmSystem sys(op, r, q, rho);
    return em_solve(sys, u, cfg.em_max, cfg.em_tol, trace);
}

/// H-subproblem objective sum_i -log f(op_i h; sigma_i) + (rho/2)||h - u||^2.
inline double h_subproblem_objective(std::span<const LevelIndex> r, const MeasurementOperator &op, const RVector &h,
                                     const RVector &u, double rho, const Quantizer &q) {
    return nll_sum(r, op.rows * h, op.sigmas, q) + 0.5 * rho * (h - u).squaredNorm();
}

} // namespace csifb

#endif

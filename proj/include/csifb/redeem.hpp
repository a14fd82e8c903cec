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

#ifndef CSIFB_REDEEM_HPP
#define CSIFB_REDEEM_HPP

#include "em.hpp"
#include "relax.hpp"

#include <cmath>
#include <optional>
#include <ostream>
#include <vector>

namespace csifb {

/// ADMM iterate: channel parameters z, splitting variable H, scaled-free dual Lambda.
struct SolverState {
    ChannelParams z;
    CMatrix h;
    CMatrix lambda;
    std::vector<double> residual_history; // ||G(z^l) - H^l||_F per completed iteration
    std::vector<double> nmse_history;     // filled only when the truth is supplied
};

struct RecoveryResult {
    ChannelParams params;
    ChannelMatrix channel; // G(params)
    SolverState state;
};

/// Maximum-likelihood channel recovery from quantized feedback by ADMM on
///   min -log p(r | h)  s.t.  G(z) = H,
/// alternating a Mod-RELAX z-update on H - Lambda/rho, an EM H-update towards
/// G(z) + Lambda/rho, and a dual ascent step. All variables start at zero
/// unless `initial` supplies a starting H.
inline RecoveryResult redeem_solve(const FeedbackPayload &payload, const MeasurementOperator &op, const Quantizer &q,
                                   const SolverConfig &cfg, int num_paths, double spacing_ratio,
                                   const ChannelMatrix *truth = nullptr, const ChannelMatrix *initial = nullptr) {
    payload.validate();
    cfg.validate();
    require(num_paths >= 1, "redeem_solve: K must be >= 1");
    require(op.measurements() == payload.measurements(), "redeem_solve: operator rows must match payload length");
    require(op.rows.cols() == 2 * static_cast<Eigen::Index>(payload.num_rx) * payload.num_tx,
            "redeem_solve: operator columns must equal 2MN");
    require(payload.num_levels == q.num_levels(), "redeem_solve: payload and quantizer disagree on Q");
    const Eigen::Index m = payload.num_rx, n = payload.num_tx;
    if (truth)
        require(truth->rows() == m && truth->cols() == n, "redeem_solve: truth has the wrong shape");

    const EmSystem em(op, payload.indices, q, cfg.rho);
    const double rho = cfg.rho;

    if (initial)
        require(initial->rows() == m && initial->cols() == n, "redeem_solve: initial H has the wrong shape");

    SolverState st;
    st.h = initial ? *initial : CMatrix::Zero(m, n);
    st.lambda = CMatrix::Zero(m, n);
    std::vector<Harmonic> comps;
    CMatrix gz = CMatrix::Zero(m, n);

    for (int it = 0; it < cfg.max_outer; ++it) {
        comps = mod_relax_harmonics(st.h - st.lambda / rho, num_paths, cfg);
        gz = synthesize_harmonics(comps, m, n);

        const RVector u = real_embed_stacked(gz + st.lambda / rho);
        const CMatrix h_next = un_embed_stacked(em_solve(em, u, cfg.em_max, cfg.em_tol), m, n);

        const CMatrix gap = gz - h_next;
        st.lambda += rho * gap;
        const double residual = gap.norm();
        if (!std::isfinite(residual))
            throw NumericalError("redeem_solve: non-finite primal residual (likelihood underflow?)");
        st.residual_history.push_back(residual);
        if (truth)
            st.nmse_history.push_back((*truth - gz).squaredNorm() / truth->squaredNorm());

        const double change = (h_next - st.h).norm();
        const double scale = h_next.norm();
        st.h = h_next;
        if (it > 0 && change <= cfg.outer_tol * scale)
            break;
    }

    st.z = harmonics_to_params(comps, spacing_ratio);
    return {st.z, gz, std::move(st)};
}

/// Per-iteration convergence trace as CSV: iteration,primal_residual,nmse.
inline void write_trace_csv(std::ostream &os, const SolverState &st) {
    os << "iteration,primal_residual,nmse\n";
    for (std::size_t i = 0; i < st.residual_history.size(); ++i) {
        os << i + 1 << ',' << st.residual_history[i] << ',';
        if (i < st.nmse_history.size())
            os << st.nmse_history[i];
        os << '\n';
    }
}

} // namespace csifb

#endif

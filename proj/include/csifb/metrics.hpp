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

#ifndef CSIFB_METRICS_HPP
#define CSIFB_METRICS_HPP

#include "common.hpp"

namespace csifb {

/// ||H - H_hat||_F^2 / ||H||_F^2.
inline double nmse(const CMatrix &truth, const CMatrix &estimate) {
    require(truth.rows() == estimate.rows() && truth.cols() == estimate.cols(), "nmse: shape mismatch");
    const double den = truth.squaredNorm();
    require(den > 0.0, "nmse: zero ground truth");
    return (truth - estimate).squaredNorm() / den;
}

/// Beamforming gain |tr(H_hat^H H)|^2 / ||H_hat||_F^2.
inline double bgain(const CMatrix &truth, const CMatrix &estimate) {
    require(truth.rows() == estimate.rows() && truth.cols() == estimate.cols(), "bgain: shape mismatch");
    const double den = estimate.squaredNorm();
    require(den > 0.0, "bgain: zero estimate");
    // tr(A^H B) = sum conj(A) .* B
    const cplx tr = (estimate.conjugate().array() * truth.array()).sum();
    return std::norm(tr) / den;
}

} // namespace csifb

#endif

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

#ifndef CSIFB_SOLVER_CONFIG_HPP
#define CSIFB_SOLVER_CONFIG_HPP

#include "common.hpp"

namespace csifb {

/// Penalty and iteration budgets of the ADMM recovery and its two inner solvers.
struct SolverConfig {
    double rho = 1.0;            // ADMM penalty
    int max_outer = 30;          // ADMM iterations
    double outer_tol = 1e-4;     // stop on relative change of H
    int relax_bcd_max = 60;      // block-coordinate cycles per Mod-RELAX stage
    double relax_bcd_tol = 1e-3; // stop on relative parameter change
    int ga_max = 20;             // gradient-ascent steps per component update
    int em_max = 60;             // EM iterations per H-update
    double em_tol = 1e-6;        // stop on relative change of h
    int fft_oversample = 8;      // zero-padding factor of the coarse 2D-FFT grid

    void validate() const {
        require(rho > 0.0, "solver: rho must be > 0");
        require(max_outer >= 1, "solver: max_outer must be >= 1");
        require(outer_tol > 0.0, "solver: outer_tol must be > 0");
        require(relax_bcd_max >= 1, "solver: relax_bcd_max must be >= 1");
        require(relax_bcd_tol > 0.0, "solver: relax_bcd_tol must be > 0");
        require(ga_max >= 1, "solver: ga_max must be >= 1");
        require(em_max >= 1, "solver: em_max must be >= 1");
        require(em_tol > 0.0, "solver: em_tol must be > 0");
        require(fft_oversample >= 1, "solver: fft_oversample must be >= 1");
    }
};

} // namespace csifb

#endif

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

#ifndef CSIFB_FFT2D_HPP
#define CSIFB_FFT2D_HPP

#include "common.hpp"

#include <fftw3.h>

#include <map>
#include <memory>
#include <mutex>
#include <utility>

namespace csifb {

// Planner calls into FFTW are not thread-safe; execution with a plan is.
inline std::mutex &fftw_planner_mutex() {
    static std::mutex m;
    return m;
}

/// Forward 2D DFT of a column-major rows x cols complex array,
/// F(k, l) = sum_{m,n} X(m, n) exp(-j 2 pi (k m / rows + l n / cols)).
class Fft2D {
  public:
    Fft2D(Eigen::Index rows, Eigen::Index cols) : rows_(rows), cols_(cols), buf_(CMatrix::Zero(rows, cols)) {
        std::lock_guard lock(fftw_planner_mutex());
        auto *p = reinterpret_cast<fftw_complex *>(buf_.data());
        // Column-major rows x cols is row-major cols x rows; the 2D DFT is the same.
        plan_ = fftw_plan_dft_2d(static_cast<int>(cols), static_cast<int>(rows), p, p, FFTW_FORWARD, FFTW_ESTIMATE);
        if (!plan_)
            throw NumericalError("FFTW planning failed");
    }
    Fft2D(const Fft2D &) = delete;
    Fft2D &operator=(const Fft2D &) = delete;
    ~Fft2D() {
        std::lock_guard lock(fftw_planner_mutex());
        fftw_destroy_plan(plan_);
    }

    Eigen::Index rows() const { return rows_; }
    Eigen::Index cols() const { return cols_; }

    /// Zero-pads `x` into the top-left corner and transforms in place; the
    /// returned reference is valid until the next call.
    const CMatrix &padded_transform(const CMatrix &x) {
        buf_.setZero();
        buf_.topLeftCorner(x.rows(), x.cols()) = x;
        fftw_execute(plan_);
        return buf_;
    }

  private:
    Eigen::Index rows_, cols_;
    CMatrix buf_;
    fftw_plan plan_ = nullptr;
};

/// One plan per grid size per thread.
inline Fft2D &thread_fft(Eigen::Index rows, Eigen::Index cols) {
    thread_local std::map<std::pair<Eigen::Index, Eigen::Index>, std::unique_ptr<Fft2D>> cache;
    auto &slot = cache[{rows, cols}];
    if (!slot)
        slot = std::make_unique<Fft2D>(rows, cols);
    return *slot;
}

} // namespace csifb

#endif

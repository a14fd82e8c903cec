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

#ifndef CSIFB_COMMON_HPP
#define CSIFB_COMMON_HPP

#include <Eigen/Dense>

#include <complex>
#include <cstdint>
#include <numbers>
#include <random>
#include <stdexcept>
#include <string>

namespace csifb {

using cplx = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RMatrix = Eigen::MatrixXd;
using RVector = Eigen::VectorXd;

inline constexpr double pi = std::numbers::pi;

// Raised for malformed inputs: dimension mismatches, bad ranges, bad records.
class InvalidArgument : public std::invalid_argument {
  public:
    using std::invalid_argument::invalid_argument;
};

// Raised when a numerical routine produces a non-finite result it cannot recover from.
class NumericalError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

inline void require(bool cond, const std::string &msg) {
    if (!cond)
        throw InvalidArgument(msg);
}

using Rng = std::mt19937_64;

// SplitMix64 finalizer. Child seeds are hash(parent, stream) so every trial and
// every stage inside a trial has an independent, order-free random stream.
inline std::uint64_t mix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t parent, std::uint64_t stream) {
    return mix64(mix64(parent) ^ (stream * 0xd6e8feb86659fd93ULL + 0x632be59bd9b4e019ULL));
}

// Named sub-streams of a trial seed.
enum class Stream : std::uint64_t {
    channel = 1,
    noise = 2,
    operator_draw = 3,
    dither = 4,
    calibration = 5,
    pilots = 6,
    compressor = 7,
    srec = 8,
};

inline std::uint64_t derive_seed(std::uint64_t parent, Stream s) {
    return derive_seed(parent, static_cast<std::uint64_t>(s));
}

inline RVector randn(Rng &rng, Eigen::Index n, double sigma = 1.0) {
    std::normal_distribution<double> nd(0.0, sigma);
    RVector v(n);
    for (Eigen::Index i = 0; i < n; ++i)
        v[i] = nd(rng);
    return v;
}

// Column-major fill, i.i.d. N(0, sigma^2).
inline RMatrix randn(Rng &rng, Eigen::Index rows, Eigen::Index cols, double sigma) {
    std::normal_distribution<double> nd(0.0, sigma);
    RMatrix m(rows, cols);
    for (Eigen::Index j = 0; j < cols; ++j)
        for (Eigen::Index i = 0; i < rows; ++i)
            m(i, j) = nd(rng);
    return m;
}

// i.i.d. CN(0, sigma^2): real and imaginary parts each N(0, sigma^2 / 2).
inline CMatrix crandn(Rng &rng, Eigen::Index rows, Eigen::Index cols, double sigma) {
    std::normal_distribution<double> nd(0.0, sigma / std::sqrt(2.0));
    CMatrix m(rows, cols);
    for (Eigen::Index j = 0; j < cols; ++j)
        for (Eigen::Index i = 0; i < rows; ++i) {
            const double re = nd(rng);
            const double im = nd(rng);
            m(i, j) = cplx(re, im);
        }
    return m;
}

} // namespace csifb

#endif

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

#ifndef CSIFB_FEEDBACK_HPP
#define CSIFB_FEEDBACK_HPP

#include "channel.hpp"
#include "quantizer.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace csifb {

enum class PilotKind { orthogonal, gaussian };

/// N x T pilot block S transmitted by the BS, column t is s_t.
struct PilotMatrix {
    CMatrix entries;
    PilotKind kind = PilotKind::orthogonal;

    Eigen::Index num_tx() const { return entries.rows(); }
    Eigen::Index length() const { return entries.cols(); }
};

inline constexpr int default_pilot_length_factor = 4; // T = 4N

inline bool is_power_of_two(Eigen::Index t) { return t > 0 && (t & (t - 1)) == 0; }

// Sylvester-Hadamard matrix; rows are the Walsh (OVSF) codes of length t.
inline RMatrix hadamard(Eigen::Index t) {
    require(is_power_of_two(t), "hadamard: order must be a power of two");
    RMatrix h = RMatrix::Ones(1, 1);
    while (h.rows() < t) {
        const Eigen::Index n = h.rows();
        RMatrix next(2 * n, 2 * n);
        next << h, h, h, -h;
        h = std::move(next);
    }
    return h;
}

/// Orthogonal pilots satisfy S S^H = I: Walsh/OVSF +-1 codes scaled by 1/sqrt(T)
/// when T is a power of two, unit-modulus DFT rows otherwise. Gaussian pilots are
/// i.i.d. CN(0, 1).
inline PilotMatrix make_pilots(PilotKind kind, int num_tx, int length, Rng &rng) {
    require(num_tx >= 1 && length >= 1, "make_pilots: dimensions must be positive");
    PilotMatrix s;
    s.kind = kind;
    if (kind == PilotKind::gaussian) {
        s.entries = crandn(rng, num_tx, length, 1.0);
        return s;
    }
    require(length >= num_tx, "make_pilots: orthogonal pilots need T >= N");
    const double scale = 1.0 / std::sqrt(static_cast<double>(length));
    if (is_power_of_two(length)) {
        s.entries = (hadamard(length).topRows(num_tx) * scale).cast<cplx>();
    } else {
        s.entries.resize(num_tx, length);
        for (int t = 0; t < length; ++t)
            for (int n = 0; n < num_tx; ++n)
                s.entries(n, t) = std::polar(scale, -2.0 * pi * n * t / length);
    }
    return s;
}

/// Noise level giving the requested per-entry SNR ||H S||_F^2 / (M T sigma^2).
inline double noise_sigma_for_snr(const ChannelMatrix &h, const PilotMatrix &s, double snr_db) {
    const double signal = (h * s.entries).squaredNorm();
    const double denom = static_cast<double>(h.rows()) * s.length() * std::pow(10.0, snr_db / 10.0);
    return std::sqrt(signal / denom);
}

/// Y = H S + noise, noise i.i.d. CN(0, noise_sigma^2).
inline CMatrix simulate_downlink(const ChannelMatrix &h, const PilotMatrix &s, double noise_sigma, Rng &rng) {
    require(h.cols() == s.num_tx(), "simulate_downlink: H columns must equal pilot rows");
    require(noise_sigma >= 0.0, "simulate_downlink: noise sigma must be >= 0");
    CMatrix y = h * s.entries;
    if (noise_sigma > 0.0)
        y += crandn(rng, y.rows(), y.cols(), noise_sigma);
    return y;
}

/// Least-squares channel estimate Y S^H for row-orthogonal pilots.
inline ChannelMatrix ls_estimate(const CMatrix &y, const PilotMatrix &s) {
    require(s.kind == PilotKind::orthogonal, "ls_estimate: pilots must be row-orthogonal");
    require(y.cols() == s.length(), "ls_estimate: Y columns must equal pilot length");
    return y * s.entries.adjoint();
}

// ---------------------------------------------------------------------------
// Shared-seed operators

/// R x J Gaussian compressor, entries N(0, 1/R), reproducible from `seed`.
inline RMatrix make_compressor_scheme1(std::uint64_t seed, int num_measurements, int dim) {
    require(num_measurements >= 1 && dim >= 1, "make_compressor_scheme1: dimensions must be positive");
    Rng rng(derive_seed(seed, Stream::compressor));
    return randn(rng, num_measurements, dim, 1.0 / std::sqrt(static_cast<double>(num_measurements)));
}

/// Scheme 2 Gaussian pilots regenerated from the shared seed.
inline PilotMatrix scheme2_pilots(std::uint64_t seed, int num_tx, int length) {
    Rng rng(derive_seed(seed, Stream::pilots));
    return make_pilots(PilotKind::gaussian, num_tx, length, rng);
}

/// T x 2M matrix whose row t is the per-instant compressor a_t ~ N(0, I / T^2).
inline RMatrix scheme2_compressors(std::uint64_t seed, int num_rx, int length) {
    require(num_rx >= 1 && length >= 1, "scheme2_compressors: dimensions must be positive");
    Rng rng(derive_seed(seed, Stream::compressor));
    return randn(rng, length, 2 * num_rx, 1.0 / static_cast<double>(length));
}

// ---------------------------------------------------------------------------
// Feedback payload

enum class Scheme { scheme1, scheme2 };

inline std::string to_string(Scheme s) { return s == Scheme::scheme1 ? "scheme1" : "scheme2"; }

inline Scheme scheme_from_string(const std::string &s) {
    if (s == "scheme1" || s == "1")
        return Scheme::scheme1;
    if (s == "scheme2" || s == "2")
        return Scheme::scheme2;
    throw InvalidArgument("unknown scheme '" + s + "'");
}

/// What the UE sends back: quantized level indices plus the metadata the BS
/// needs to regenerate the compression operator from the shared seed.
struct FeedbackPayload {
    Scheme scheme = Scheme::scheme1;
    int num_levels = 2;
    std::vector<LevelIndex> indices;
    int num_rx = 0;
    int num_tx = 0;
    std::uint64_t seed = 0;
    std::optional<double> noise_sigma;

    int measurements() const { return static_cast<int>(indices.size()); }

    int bits() const {
        int b = 0;
        while ((1 << b) < num_levels)
            ++b;
        return measurements() * b;
    }

    void validate() const {
        require(num_levels >= 2, "payload: need at least 2 levels");
        require(num_rx >= 1 && num_tx >= 1, "payload: dimensions must be positive");
        require(!indices.empty(), "payload: no indices");
        for (auto r : indices)
            require(r >= 0 && r < num_levels, "payload: index out of range");
    }

    bool operator==(const FeedbackPayload &) const = default;
};

inline nlohmann::json to_json(const FeedbackPayload &p) {
    nlohmann::json j{{"scheme", to_string(p.scheme)}, {"Q", p.num_levels}, {"M", p.num_rx},
                     {"N", p.num_tx},                 {"seed", p.seed},    {"indices", p.indices}};
    j["noise_sigma"] = p.noise_sigma ? nlohmann::json(*p.noise_sigma) : nlohmann::json(nullptr);
    return j;
}

inline FeedbackPayload payload_from_json(const nlohmann::json &j) {
    try {
        FeedbackPayload p;
        p.scheme = scheme_from_string(j.at("scheme").get<std::string>());
        p.num_levels = j.at("Q").get<int>();
        p.num_rx = j.at("M").get<int>();
        p.num_tx = j.at("N").get<int>();
        p.seed = j.at("seed").get<std::uint64_t>();
        p.indices = j.at("indices").get<std::vector<LevelIndex>>();
        if (j.contains("noise_sigma") && !j["noise_sigma"].is_null())
            p.noise_sigma = j["noise_sigma"].get<double>();
        p.validate();
        return p;
    } catch (const nlohmann::json::exception &e) {
        throw InvalidArgument(std::string("payload record: ") + e.what());
    }
}

// ---------------------------------------------------------------------------
// UE-side encoders

/// Scheme 1: x = A vec([Re H; Im H]), r_i = Q(x_i + v_i), v_i ~ N(0, sigma_v^2).
inline FeedbackPayload encode_scheme1(const ChannelMatrix &h_hat, const RMatrix &a, std::uint64_t seed,
                                      const Quantizer &q, Rng &dither_rng) {
    require(a.cols() == 2 * h_hat.size(), "encode_scheme1: A must have 2MN columns");
    const RVector x = a * real_embed_stacked(h_hat);
    std::normal_distribution<double> dither(0.0, q.dither_sigma());
    FeedbackPayload p;
    p.scheme = Scheme::scheme1;
    p.num_levels = q.num_levels();
    p.num_rx = static_cast<int>(h_hat.rows());
    p.num_tx = static_cast<int>(h_hat.cols());
    p.seed = seed;
    p.indices.resize(static_cast<std::size_t>(x.size()));
    for (Eigen::Index i = 0; i < x.size(); ++i)
        p.indices[static_cast<std::size_t>(i)] = quantize(x[i], dither(dither_rng), q);
    return p;
}

/// Per-instant compression x_t = a_t^T [Re y_t; Im y_t]. Touches only the M x T
/// received block and the T x 2M compressors.
inline RVector scheme2_compress(const CMatrix &y, const RMatrix &compressors) {
    const Eigen::Index m = y.rows();
    require(compressors.rows() == y.cols() && compressors.cols() == 2 * m,
            "scheme2_compress: compressors must be T x 2M");
    RVector x(y.cols());
    for (Eigen::Index t = 0; t < y.cols(); ++t)
        x[t] = compressors.row(t).head(m).dot(y.col(t).real()) + compressors.row(t).tail(m).dot(y.col(t).imag());
    return x;
}

/// Scheme 2: compress each received snapshot with its own a_t (regenerated from
/// `seed`) and quantize with dither. The pilots only fix T.
inline FeedbackPayload encode_scheme2(const CMatrix &y, const PilotMatrix &s, std::uint64_t seed,
                                      const Quantizer &q, double noise_sigma, Rng &dither_rng) {
    require(y.cols() == s.length(), "encode_scheme2: Y must have T columns");
    const auto m = static_cast<int>(y.rows());
    const auto t = static_cast<int>(y.cols());
    const RVector x = scheme2_compress(y, scheme2_compressors(seed, m, t));
    std::normal_distribution<double> dither(0.0, q.dither_sigma());
    FeedbackPayload p;
    p.scheme = Scheme::scheme2;
    p.num_levels = q.num_levels();
    p.num_rx = m;
    p.num_tx = static_cast<int>(s.num_tx());
    p.seed = seed;
    p.noise_sigma = noise_sigma;
    p.indices.resize(static_cast<std::size_t>(t));
    for (int i = 0; i < t; ++i)
        p.indices[static_cast<std::size_t>(i)] = quantize(x[i], dither(dither_rng), q);
    return p;
}

// ---------------------------------------------------------------------------
// BS-side operators

/// Design matrix D (rows s~_t^T kron a_t^T, acting on vec of the 2M x 2N real
/// block embedding) and per-row effective noise sigma.
struct DesignMatrix {
    RMatrix d;
    RVector sigmas;
};

inline RVector scheme2_row_sigmas(const RMatrix &compressors, double noise_sigma, double dither_sigma) {
    // Re/Im parts of CN(0, sigma_n^2) noise each carry sigma_n^2 / 2.
    const RVector energy = compressors.rowwise().squaredNorm();
    return (0.5 * noise_sigma * noise_sigma * energy.array() + dither_sigma * dither_sigma).sqrt().matrix();
}

inline DesignMatrix build_design_matrix(const PilotMatrix &s, std::uint64_t seed, int length, int num_rx,
                                        int num_tx, double noise_sigma, double dither_sigma) {
    require(s.length() == length && s.num_tx() == num_tx, "build_design_matrix: pilot dimensions disagree");
    const RMatrix a = scheme2_compressors(seed, num_rx, length);
    const Eigen::Index two_m = 2 * num_rx, two_n = 2 * num_tx;
    DesignMatrix out;
    out.d.resize(length, two_m * two_n);
    for (int t = 0; t < length; ++t) {
        RVector st(two_n);
        st << s.entries.col(t).real(), s.entries.col(t).imag();
        for (Eigen::Index p = 0; p < two_n; ++p)
            out.d.row(t).segment(p * two_m, two_m) = st[p] * a.row(t);
    }
    out.sigmas = scheme2_row_sigmas(a, noise_sigma, dither_sigma);
    return out;
}

/// Linear measurement model x = rows * h + N(0, diag(sigmas^2)) in terms of the
/// stacked real channel vector h = vec([Re H; Im H]).
struct MeasurementOperator {
    RMatrix rows;
    RVector sigmas;
    int num_rx = 0;
    int num_tx = 0;

    Eigen::Index measurements() const { return rows.rows(); }
};

/// Re-expresses D (which acts on the block embedding) on the stacked vector:
/// row t maps h to a_t^T H~ s~_t.
inline RMatrix scheme2_stacked_rows(const PilotMatrix &s, const RMatrix &compressors, int num_rx, int num_tx) {
    const Eigen::Index m = num_rx, n = num_tx, t_len = s.length();
    RMatrix rows(t_len, 2 * m * n);
    for (Eigen::Index t = 0; t < t_len; ++t) {
        const auto a1 = compressors.row(t).head(m);
        const auto a2 = compressors.row(t).tail(m);
        for (Eigen::Index j = 0; j < n; ++j) {
            const double sr = s.entries(j, t).real(), si = s.entries(j, t).imag();
            rows.row(t).segment(2 * m * j, m) = a1 * sr + a2 * si;
            rows.row(t).segment(2 * m * j + m, m) = a2 * sr - a1 * si;
        }
    }
    return rows;
}

inline MeasurementOperator scheme1_operator(std::uint64_t seed, int measurements, int num_rx, int num_tx,
                                            double dither_sigma) {
    MeasurementOperator op;
    op.rows = make_compressor_scheme1(seed, measurements, 2 * num_rx * num_tx);
    op.sigmas = RVector::Constant(measurements, dither_sigma);
    op.num_rx = num_rx;
    op.num_tx = num_tx;
    return op;
}

inline MeasurementOperator scheme2_operator(std::uint64_t seed, int length, int num_rx, int num_tx,
                                            double noise_sigma, double dither_sigma) {
    const PilotMatrix s = scheme2_pilots(seed, num_tx, length);
    const RMatrix a = scheme2_compressors(seed, num_rx, length);
    MeasurementOperator op;
    op.rows = scheme2_stacked_rows(s, a, num_rx, num_tx);
    op.sigmas = scheme2_row_sigmas(a, noise_sigma, dither_sigma);
    op.num_rx = num_rx;
    op.num_tx = num_tx;
    return op;
}

/// BS-side reconstruction of the measurement operator from what the payload carries.
inline MeasurementOperator operator_for(const FeedbackPayload &p, const Quantizer &q) {
    p.validate();
    require(p.num_levels == q.num_levels(), "operator_for: payload and quantizer disagree on Q");
    if (p.scheme == Scheme::scheme1)
        return scheme1_operator(p.seed, p.measurements(), p.num_rx, p.num_tx, q.dither_sigma());
    return scheme2_operator(p.seed, p.measurements(), p.num_rx, p.num_tx, p.noise_sigma.value_or(0.0),
                            q.dither_sigma());
}

} // namespace csifb

#endif

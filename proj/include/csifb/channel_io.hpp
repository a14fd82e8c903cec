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

#ifndef CSIFB_CHANNEL_IO_HPP
#define CSIFB_CHANNEL_IO_HPP

#include "channel.hpp"

#include <nlohmann/json.hpp>

#include <fstream>
#include <iomanip>
#include <limits>
#include <optional>
#include <sstream>
#include <string>

namespace csifb {

// Channel exchange format: a CSV with header "m,n,re,im" (0-indexed entries, any
// order, every entry present exactly once) plus a JSON sidecar "<csv>.meta.json"
// holding {"M": .., "N": .., "K": ..}; K is optional.

struct ImportedChannel {
    ChannelMatrix h;
    std::optional<int> num_paths;
};

inline std::string channel_meta_path(const std::string &csv_path) { return csv_path + ".meta.json"; }

inline void write_channel_csv(const std::string &csv_path, const ChannelMatrix &h,
                              std::optional<int> num_paths = std::nullopt) {
    std::ofstream out(csv_path);
    if (!out)
        throw InvalidArgument("cannot open " + csv_path + " for writing");
    out << "m,n,re,im\n" << std::setprecision(std::numeric_limits<double>::max_digits10);
    for (Eigen::Index j = 0; j < h.cols(); ++j)
        for (Eigen::Index i = 0; i < h.rows(); ++i)
            out << i << ',' << j << ',' << h(i, j).real() << ',' << h(i, j).imag() << '\n';

    nlohmann::json meta{{"M", h.rows()}, {"N", h.cols()}};
    if (num_paths)
        meta["K"] = *num_paths;
    std::ofstream mout(channel_meta_path(csv_path));
    if (!mout)
        throw InvalidArgument("cannot open " + channel_meta_path(csv_path) + " for writing");
    mout << meta.dump(2) << '\n';
}

inline ImportedChannel read_channel_csv(const std::string &csv_path) {
    std::ifstream min(channel_meta_path(csv_path));
    if (!min)
        throw InvalidArgument("missing channel metadata " + channel_meta_path(csv_path));
    nlohmann::json meta;
    try {
        min >> meta;
    } catch (const nlohmann::json::exception &e) {
        throw InvalidArgument("bad channel metadata: " + std::string(e.what()));
    }
    if (!meta.contains("M") || !meta.contains("N"))
        throw InvalidArgument("channel metadata needs M and N");
    const int m = meta["M"].get<int>();
    const int n = meta["N"].get<int>();
    require(m >= 1 && n >= 1, "channel metadata: M and N must be positive");

    ImportedChannel out;
    if (meta.contains("K") && !meta["K"].is_null())
        out.num_paths = meta["K"].get<int>();

    std::ifstream in(csv_path);
    if (!in)
        throw InvalidArgument("cannot open channel file " + csv_path);
    std::string line;
    std::getline(in, line);
    if (!line.empty() && line.back() == '\r')
        line.pop_back();
    if (line != "m,n,re,im")
        throw InvalidArgument("channel CSV header must be 'm,n,re,im'");

    out.h = ChannelMatrix::Zero(m, n);
    Eigen::MatrixXi seen = Eigen::MatrixXi::Zero(m, n);
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line == "\r")
            continue;
        std::istringstream ss(line);
        long i = -1, j = -1;
        double re = 0, im = 0;
        char c1 = 0, c2 = 0, c3 = 0;
        if (!(ss >> i >> c1 >> j >> c2 >> re >> c3 >> im) || c1 != ',' || c2 != ',' || c3 != ',')
            throw InvalidArgument("malformed channel CSV line " + std::to_string(lineno));
        if (i < 0 || i >= m || j < 0 || j >= n)
            throw InvalidArgument("channel CSV index out of range on line " + std::to_string(lineno));
        if (seen(i, j)++)
            throw InvalidArgument("duplicate channel entry on line " + std::to_string(lineno));
        out.h(i, j) = cplx(re, im);
    }
    if (seen.minCoeff() == 0)
        throw InvalidArgument("channel CSV is missing entries");
    return out;
}

} // namespace csifb

#endif

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

#ifndef CSIFB_PARALLEL_HPP
#define CSIFB_PARALLEL_HPP

#include <algorithm>
#include <atomic>
#include <exception>
#include <thread>
#include <type_traits>
#include <vector>

namespace csifb {

/// Evaluates fn(0..count-1) on up to `threads` workers (0: hardware
/// concurrency). Results come back in index order; the first exception by
/// index is rethrown after all workers stop.
template <class Fn> auto parallel_map(int count, int threads, Fn &&fn) -> std::vector<std::invoke_result_t<Fn &, int>> {
    using R = std::invoke_result_t<Fn &, int>;
    std::vector<R> out(static_cast<std::size_t>(std::max(count, 0)));
    if (count <= 0)
        return out;
    unsigned hw = std::thread::hardware_concurrency();
    int workers = threads > 0 ? threads : static_cast<int>(hw == 0 ? 1 : hw);
    workers = std::min(workers, count);

    std::vector<std::exception_ptr> errors(out.size());
    std::atomic<int> next{0};
    auto body = [&] {
        for (int i = next++; i < count; i = next++) {
            try {
                out[static_cast<std::size_t>(i)] = fn(i);
            } catch (...) {
                errors[static_cast<std::size_t>(i)] = std::current_exception();
            }
        }
    };
    if (workers == 1) {
        body();
    } else {
        std::vector<std::thread> pool;
        for (int w = 0; w < workers; ++w)
            pool.emplace_back(body);
        for (auto &t : pool)
            t.join();
    }
    for (auto &e : errors)
        if (e)
            std::rethrow_exception(e);
    return out;
}

} // namespace csifb

#endif

/*
 * Copyright 2026 The pcosync Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

// Monte Carlo reachability estimation, used to cross-validate the exact solvers.

#include "pcosync/dtmc.hpp"

#include <cmath>
#include <cstdint>
#include <random>

namespace pcosync {

struct McEstimate {
    double estimate = 0;
    double half_width = 0; ///< 95% normal-approximation half-width
    std::size_t paths = 0;
    std::size_t hits = 0;
};

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

} // namespace detail

/// Fraction of `paths` simulated runs of at most `horizon` steps from the
/// initial state that visit `target`. Path i draws from its own generator
/// seeded with splitmix64(seed + i), so results do not depend on scheduling.
inline McEstimate mc_estimate(const SparseDtmc<double>& d, const StateSet& target, std::size_t paths,
                              std::size_t horizon, std::uint64_t seed) {
    if (horizon < 1) throw Error("horizon must be at least 1");
    if (target.size() != d.num_states()) throw Error("state set size does not match the model");
    McEstimate out;
    out.paths = paths;
    std::uniform_real_distribution<double> uniform(0.0, 1.0);
    for (std::size_t i = 0; i < paths; ++i) {
        std::mt19937_64 rng(detail::splitmix64(seed + i));
        StateIndex s = d.initial();
        bool hit = target[s];
        for (std::size_t step = 0; step < horizon && !hit; ++step) {
            const auto row = d.row(s);
            if (row.empty()) break;
            double u = uniform(rng);
            s = row.back().target;
            for (const auto& e : row) {
                if (u < e.probability) {
                    s = e.target;
                    break;
                }
                u -= e.probability;
            }
            hit = target[s];
        }
        if (hit) ++out.hits;
    }
    if (paths > 0) {
        const double p = static_cast<double>(out.hits) / static_cast<double>(paths);
        out.estimate = p;
        out.half_width = 1.96 * std::sqrt(p * (1 - p) / static_cast<double>(paths));
    }
    return out;
}

} // namespace pcosync

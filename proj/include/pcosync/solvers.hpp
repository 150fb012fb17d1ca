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

#include "pcosync/dtmc.hpp"
#include "pcosync/error.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <vector>

namespace pcosync {

struct SolveOptions {
    double tolerance = 1e-14;              ///< relative change between sweeps
    std::size_t max_iterations = 1'000'000;
};

struct SolveResult {
    std::vector<double> values;
    double residual = 0;        ///< max |x - (P x + b)| over the solved states
    std::size_t iterations = 0;
};

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

/// Incoming edges of every state.
inline std::vector<std::vector<StateIndex>> predecessor_lists(const SparseDtmc<double>& d) {
    std::vector<std::vector<StateIndex>> pred(d.num_states());
    for (StateIndex s = 0; s < d.num_states(); ++s) {
        for (const auto& e : d.row(s)) pred[e.target].push_back(s);
    }
    return pred;
}

namespace detail {

/// States that can reach `from` backwards through states in `through`.
inline StateSet backward_reach(const std::vector<std::vector<StateIndex>>& pred, const StateSet& from,
                               const StateSet& through) {
    StateSet seen = from;
    std::deque<StateIndex> queue;
    for (StateIndex s = 0; s < from.size(); ++s) {
        if (from[s]) queue.push_back(s);
    }
    while (!queue.empty()) {
        const StateIndex s = queue.front();
        queue.pop_front();
        for (StateIndex t : pred[s]) {
            if (!seen[t] && through[t]) {
                seen[t] = true;
                queue.push_back(t);
            }
        }
    }
    return seen;
}

inline void check_set(const SparseDtmc<double>& d, const StateSet& s) {
    if (s.size() != d.num_states()) throw Error("state set size does not match the model");
}

} // namespace detail

inline StateSet all_states(const SparseDtmc<double>& d) { return StateSet(d.num_states(), true); }

/// States from which B is unreachable along A-paths.
inline StateSet prob0(const SparseDtmc<double>& d, const StateSet& A, const StateSet& B) {
    const auto reach = detail::backward_reach(predecessor_lists(d), B, A);
    StateSet no(d.num_states());
    for (StateIndex s = 0; s < no.size(); ++s) no[s] = !reach[s];
    return no;
}

/// States that reach B along A-paths with probability one.
inline StateSet prob1(const SparseDtmc<double>& d, const StateSet& A, const StateSet& B) {
    const auto pred = predecessor_lists(d);
    const auto reach = detail::backward_reach(pred, B, A);
    StateSet no(d.num_states()), a_not_b(d.num_states());
    for (StateIndex s = 0; s < no.size(); ++s) {
        no[s] = !reach[s];
        a_not_b[s] = A[s] && !B[s];
    }
    const auto can_fail = detail::backward_reach(pred, no, a_not_b);
    StateSet yes(d.num_states());
    for (StateIndex s = 0; s < yes.size(); ++s) yes[s] = !can_fail[s];
    return yes;
}

inline std::vector<double> prob_next(const SparseDtmc<double>& d, const StateSet& target) {
    detail::check_set(d, target);
    std::vector<double> v(d.num_states(), 0.0);
    for (StateIndex s = 0; s < d.num_states(); ++s) {
        for (const auto& e : d.row(s)) {
            if (target[e.target]) v[s] += e.probability;
        }
    }
    return v;
}

inline std::vector<double> prob_bounded_until(const SparseDtmc<double>& d, const StateSet& A, const StateSet& B,
                                              std::size_t k) {
    detail::check_set(d, A);
    detail::check_set(d, B);
    std::vector<double> x(d.num_states(), 0.0), next(d.num_states(), 0.0);
    for (StateIndex s = 0; s < x.size(); ++s) x[s] = B[s] ? 1.0 : 0.0;
    for (std::size_t step = 0; step < k; ++step) {
        for (StateIndex s = 0; s < x.size(); ++s) {
            if (B[s]) {
                next[s] = 1.0;
            } else if (!A[s]) {
                next[s] = 0.0;
            } else {
                double sum = 0;
                for (const auto& e : d.row(s)) sum += e.probability * x[e.target];
                next[s] = sum;
            }
        }
        x.swap(next);
    }
    return x;
}

namespace detail {

/// Gauss-Seidel for x_s = c_s + sum_t P(s,t) x_t on the states in `solve`;
/// other entries of x are held fixed.
inline SolveResult gauss_seidel(const SparseDtmc<double>& d, const StateSet& solve, std::vector<double> x,
                                const std::vector<double>& constant, const SolveOptions& opts) {
    std::vector<StateIndex> order;
    for (StateIndex s = 0; s < solve.size(); ++s) {
        if (solve[s]) order.push_back(s);
    }
    // Relative changes below this are rounding noise.
    constexpr double kNoiseFloor = 8 * std::numeric_limits<double>::epsilon();
    SolveResult result;
    double previous = 0;
    for (std::size_t it = 1;; ++it) {
        double change = 0;
        for (StateIndex s : order) {
            double self = 0, sum = constant[s];
            for (const auto& e : d.row(s)) {
                if (e.target == s) {
                    self += e.probability;
                } else {
                    sum += e.probability * x[e.target];
                }
            }
            const double updated = sum / (1.0 - self);
            const double diff = std::abs(updated - x[s]);
            const double scale = std::abs(updated);
            change = std::max(change, scale > 0 ? diff / scale : diff);
            x[s] = updated;
        }
        // Relative change alone stops early on slowly mixing chains, so the
        // remaining error is extrapolated from the observed contraction rate.
        const double rate = previous > 0 ? change / previous : 1.0;
        const double remaining = rate < 1 ? change * rate / (1 - rate) : kInfinity;
        previous = change;
        if (order.empty() || change <= kNoiseFloor || (change < opts.tolerance && remaining < opts.tolerance)) {
            result.iterations = it;
            break;
        }
        if (it >= opts.max_iterations) {
            throw SolverError(change, it);
        }
    }
    double residual = 0;
    for (StateIndex s : order) {
        double sum = constant[s];
        for (const auto& e : d.row(s)) sum += e.probability * x[e.target];
        residual = std::max(residual, std::abs(sum - x[s]));
    }
    result.values = std::move(x);
    result.residual = residual;
    return result;
}

} // namespace detail

/// Probability of A U B from every state: graph precomputation of the
/// probability-0 and probability-1 states, then Gauss-Seidel on the rest.
inline SolveResult prob_unbounded_until(const SparseDtmc<double>& d, const StateSet& A, const StateSet& B,
                                        const SolveOptions& opts = {}) {
    detail::check_set(d, A);
    detail::check_set(d, B);
    const auto no = prob0(d, A, B);
    const auto yes = prob1(d, A, B);
    std::vector<double> x(d.num_states(), 0.0);
    StateSet maybe(d.num_states(), false);
    for (StateIndex s = 0; s < x.size(); ++s) {
        if (yes[s]) {
            x[s] = 1.0;
        } else if (!no[s]) {
            maybe[s] = true;
        }
    }
    return detail::gauss_seidel(d, maybe, std::move(x), std::vector<double>(d.num_states(), 0.0), opts);
}

/// Expected reward accumulated before first reaching `target`: infinity where
/// the target is reached with probability below one, zero on the target.
inline SolveResult expected_reward(const SparseDtmc<double>& d, const RewardStructure& rewards,
                                   const StateSet& target, const SolveOptions& opts = {}) {
    detail::check_set(d, target);
    rewards.check_aligned(d);
    const auto sure = prob1(d, all_states(d), target);
    std::vector<double> x(d.num_states(), 0.0), constant(d.num_states(), 0.0);
    StateSet solve(d.num_states(), false);
    for (StateIndex s = 0; s < x.size(); ++s) {
        if (target[s]) continue;
        if (!sure[s]) {
            x[s] = kInfinity;
            continue;
        }
        solve[s] = true;
        double c = rewards.state[s];
        const auto row = d.row(s);
        for (std::size_t j = 0; j < row.size(); ++j) c += row[j].probability * rewards.transition[d.row_begin(s) + j];
        constant[s] = c;
    }
    return detail::gauss_seidel(d, solve, std::move(x), constant, opts);
}

} // namespace pcosync

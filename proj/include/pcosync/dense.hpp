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

// Direct dense solves used to cross-check the iterative solvers on small models.

#include "pcosync/solvers.hpp"

#include <Eigen/Dense>

namespace pcosync {

inline constexpr std::size_t kDenseLimit = 2000;

namespace detail {

/// Solves (I - P_SS) x_S = c_S + P_{S,rest} x_rest by partial-pivot LU.
inline std::vector<double> dense_solve(const SparseDtmc<double>& d, const StateSet& solve, std::vector<double> x,
                                       const std::vector<double>& constant) {
    std::vector<StateIndex> order;
    std::vector<std::ptrdiff_t> position(d.num_states(), -1);
    for (StateIndex s = 0; s < solve.size(); ++s) {
        if (solve[s]) {
            position[s] = static_cast<std::ptrdiff_t>(order.size());
            order.push_back(s);
        }
    }
    if (order.size() > kDenseLimit) throw Error("dense solve limited to " + std::to_string(kDenseLimit) + " unknowns");
    const auto n = static_cast<Eigen::Index>(order.size());
    Eigen::MatrixXd A = Eigen::MatrixXd::Identity(n, n);
    Eigen::VectorXd b(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const StateIndex s = order[static_cast<std::size_t>(i)];
        double rhs = constant[s];
        for (const auto& e : d.row(s)) {
            if (position[e.target] >= 0) {
                A(i, position[e.target]) -= e.probability;
            } else {
                rhs += e.probability * x[e.target];
            }
        }
        b(i) = rhs;
    }
    const Eigen::VectorXd solution = A.partialPivLu().solve(b);
    for (Eigen::Index i = 0; i < n; ++i) x[order[static_cast<std::size_t>(i)]] = solution(i);
    return x;
}

} // namespace detail

inline std::vector<double> prob_unbounded_until_dense(const SparseDtmc<double>& d, const StateSet& A,
                                                      const StateSet& B) {
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
    return detail::dense_solve(d, maybe, std::move(x), std::vector<double>(d.num_states(), 0.0));
}

inline std::vector<double> expected_reward_dense(const SparseDtmc<double>& d, const RewardStructure& rewards,
                                                 const StateSet& target) {
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
    return detail::dense_solve(d, solve, std::move(x), constant);
}

} // namespace pcosync

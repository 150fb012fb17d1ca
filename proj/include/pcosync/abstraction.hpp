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

// Abstraction from concrete to population states, and a numerical check that
// both models assign the same probabilities to every population transition.

#include "pcosync/concrete.hpp"
#include "pcosync/population.hpp"
#include "pcosync/solvers.hpp"

#include <cmath>
#include <map>
#include <optional>

namespace pcosync {

/// Counts oscillators per phase; defined on round-start states only.
inline GlobalState abstract_state(const ConcreteState& s, int T) {
    if (!s.is_round_start()) throw Error("abstraction is only defined for round-start states: " + s.to_string());
    GlobalState out{std::vector<int>(static_cast<std::size_t>(T), 0)};
    for (const auto& o : s.oscillators) ++out.counts[static_cast<std::size_t>(o.phase - 1)];
    return out;
}

struct AbstractionReport {
    struct Entry {
        StateIndex concrete_source; ///< 0 for the initial states
        GlobalState source;         ///< empty counts for the initial states
        GlobalState target;
        double population;
        double concrete;
    };

    ModelParams params;
    std::vector<Entry> entries;
    std::size_t sources_checked = 0; ///< round-start states plus the initial state
    double max_discrepancy = 0;
    double sync_concrete = 0;
    double sync_population = 0;

    double sync_discrepancy() const { return std::abs(sync_concrete - sync_population); }
};

/// Largest population size whose concrete model fits the state budget at
/// cycle length T, if any.
inline std::optional<int> largest_feasible_population(int T, std::size_t budget) {
    std::optional<int> best;
    for (int n = 1; n <= 16 && concrete_state_bound(n, T) <= static_cast<double>(budget); ++n) best = n;
    return best;
}

/// Throws BudgetExceeded before any construction when the concrete model of
/// these parameters could exceed the budget.
inline void check_concrete_scale(const ModelParams& p, std::size_t budget) {
    if (concrete_state_bound(p.N, p.T) <= static_cast<double>(budget)) return;
    const auto best = largest_feasible_population(p.T, budget);
    throw BudgetExceeded(budget, "concrete model for N = " + std::to_string(p.N) + ", T = " + std::to_string(p.T) +
                                     " may need up to " +
                                     std::to_string(static_cast<long long>(concrete_state_bound(p.N, p.T))) +
                                     " states; largest feasible configuration is " +
                                     (best ? "N = " + std::to_string(*best) : std::string("none")) +
                                     " at T = " + std::to_string(p.T));
}

namespace detail {

/// Distribution over the next round-start states reached from `source`.
/// Every round takes exactly N + 2 steps: reset, N mode changes, update.
template <class S>
std::map<StateIndex, S> propagate_round(const ConcreteDtmc<S>& c, StateIndex source) {
    const auto& d = c.chain;
    const auto& round_start = d.label("round_start");
    std::map<StateIndex, S> current{{source, S(1)}};
    const int steps = c.params.N + 2;
    for (int step = 1; step <= steps; ++step) {
        std::map<StateIndex, S> next;
        for (const auto& [s, mass] : current) {
            const auto row = d.row(s);
            if (row.empty()) throw Error("concrete state " + c.state(s).to_string() + " has no successor mid-round");
            for (const auto& e : row) next[e.target] += mass * e.probability;
        }
        for (const auto& [s, mass] : next) {
            if (round_start[s] != (step == steps)) {
                throw Error("round from " + c.state(source).to_string() + " " +
                            (step == steps ? "did not return to a round-start state after " + std::to_string(steps) +
                                                 " steps"
                                           : "returned to a round-start state after only " + std::to_string(step) +
                                                 " steps"));
            }
        }
        current = std::move(next);
    }
    return current;
}

template <class S>
double compare_rows(const std::map<GlobalState, S>& population, const std::map<GlobalState, S>& concrete,
                    StateIndex concrete_source, const GlobalState& source, AbstractionReport& report) {
    std::map<GlobalState, std::pair<S, S>> merged;
    for (const auto& [q, p] : population) merged[q].first += p;
    for (const auto& [q, p] : concrete) merged[q].second += p;
    double worst = 0;
    for (const auto& [q, pair] : merged) {
        const double diff = to_double(S(pair.first - pair.second));
        worst = std::max(worst, std::abs(diff));
        report.entries.push_back({concrete_source, source, q, to_double(pair.first), to_double(pair.second)});
    }
    return worst;
}

} // namespace detail

/// For the initial state and every reachable round-start concrete state s1,
/// aggregates the probability of reaching round-start states s2 by h(s2) and
/// compares it with the population transition h(s1) -> h(s2). Also compares
/// the probability of eventually synchronising from both initial states.
template <class S>
AbstractionReport check_correspondence(const ConcreteDtmc<S>& concrete, const PopulationDtmc<S>& population,
                                       const SolveOptions& opts = {}) {
    if (!(concrete.params == population.params)) throw Error("models were built from different parameters");
    const int T = population.params.T;
    AbstractionReport report;
    report.params = population.params;

    auto population_row = [&](StateIndex i) {
        std::map<GlobalState, S> row;
        for (const auto& e : population.chain.row(i)) row[population.state(e.target)] += e.probability;
        return row;
    };

    {
        std::map<GlobalState, S> pushed;
        for (const auto& e : concrete.chain.row(0)) pushed[abstract_state(concrete.state(e.target), T)] += e.probability;
        report.max_discrepancy = detail::compare_rows(population_row(0), pushed, 0, GlobalState{}, report);
        ++report.sources_checked;
    }

    const auto& round_start = concrete.chain.label("round_start");
    for (StateIndex s = 1; s < concrete.chain.num_states(); ++s) {
        if (!round_start[s]) continue;
        const GlobalState source = abstract_state(concrete.state(s), T);
        std::map<GlobalState, S> aggregated;
        for (const auto& [t, mass] : detail::propagate_round(concrete, s)) {
            aggregated[abstract_state(concrete.state(t), T)] += mass;
        }
        const double worst =
            detail::compare_rows(population_row(population.index_of(source)), aggregated, s, source, report);
        report.max_discrepancy = std::max(report.max_discrepancy, worst);
        ++report.sources_checked;
    }

    const auto dc = concrete.chain.template convert<double>();
    const auto dp = population.chain.template convert<double>();
    report.sync_concrete = prob_unbounded_until(dc, all_states(dc), dc.label("synch"), opts).values[0];
    report.sync_population = prob_unbounded_until(dp, all_states(dp), dp.label("synch"), opts).values[0];
    return report;
}

} // namespace pcosync

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

// Firing-state reduction: every non-firing state has a single deterministic
// successor, so chains of non-firing states are collapsed into direct
// transitions between firing states.

#include "pcosync/dtmc.hpp"
#include "pcosync/population.hpp"

#include <vector>

namespace pcosync {

/// Highest occupied phase.
inline int delta_max(const GlobalState& s) {
    for (int phase = s.phases(); phase >= 1; --phase) {
        if (s.count(phase) > 0) return phase;
    }
    throw Error("delta_max of an empty state");
}

/// First firing state reached from s by deterministic steps (s itself if firing).
inline GlobalState deterministic_successor(const GlobalState& s) {
    const int shift = s.phases() - delta_max(s);
    GlobalState out{std::vector<int>(s.counts.size(), 0)};
    for (int phase = 1; phase + shift <= s.phases(); ++phase) {
        out.counts[static_cast<std::size_t>(phase + shift - 1)] = s.count(phase);
    }
    return out;
}

/// Non-firing states whose deterministic successor is `firing`: the downward
/// shifts that keep every occupied phase >= 1.
inline std::vector<GlobalState> predecessors(const GlobalState& firing, const ModelParams& p) {
    if (firing.phases() != p.T || !firing.is_firing()) {
        throw Error("predecessors: " + firing.to_string() + " is not a firing state");
    }
    int lowest = 1;
    while (firing.count(lowest) == 0) ++lowest;
    std::vector<GlobalState> out;
    for (int shift = 1; shift < lowest; ++shift) {
        GlobalState s{std::vector<int>(firing.counts.size(), 0)};
        for (int phase = lowest; phase <= p.T; ++phase) {
            s.counts[static_cast<std::size_t>(phase - shift - 1)] = firing.count(phase);
        }
        out.push_back(std::move(s));
    }
    return out;
}

/// Reduced DTMC over the firing states plus the initial state (index 0).
template <class S>
struct ReducedDtmc {
    /// Where a state of the unreduced model ends up: the reduced index of its
    /// deterministic successor and the number of deterministic steps skipped.
    struct Provenance {
        StateIndex target;
        int skipped;
    };

    ModelParams params;
    std::vector<GlobalState> states;
    SparseDtmc<S> chain;
    std::vector<Provenance> provenance; ///< indexed by unreduced state index

    const GlobalState& state(StateIndex index) const { return states.at(index - 1); }

    StateIndex index_of(const GlobalState& s) const {
        auto it = std::lower_bound(states.begin(), states.end(), s);
        if (it == states.end() || *it != s) throw Error("not a state of the reduced model: " + s.to_string());
        return static_cast<StateIndex>(it - states.begin()) + 1;
    }
};

template <class S>
ReducedDtmc<S> build_reduced_dtmc(const PopulationDtmc<S>& full) {
    const auto& p = full.params;
    ReducedDtmc<S> reduced;
    reduced.params = p;
    for (const auto& s : full.states) {
        if (s.is_firing()) reduced.states.push_back(s);
    }

    reduced.provenance.resize(full.chain.num_states());
    reduced.provenance[0] = {0, 0};
    for (std::size_t i = 0; i < full.states.size(); ++i) {
        const auto& s = full.states[i];
        reduced.provenance[i + 1] = {reduced.index_of(deterministic_successor(s)), p.T - delta_max(s)};
    }

    DtmcBuilder<S> builder(reduced.states.size() + 1);
    auto add_row = [&](StateIndex from) {
        for (const auto& e : full.chain.row(from)) builder.add(reduced.provenance[e.target].target, e.probability);
        builder.finish_row();
    };
    add_row(0);
    for (const auto& s : reduced.states) add_row(full.index_of(s));
    reduced.chain = std::move(builder).build(0);
    label_synchronised(reduced.chain, reduced.states, p.N);
    return reduced;
}

/// Carries a reward structure of the full model over to its reduction so that
/// expected rewards for reaching synchronised firing states are unchanged.
/// Firing states keep their state reward; a reduced transition f1 -> f2 earns
/// the rewards collected along the skipped deterministic chain (excluding the
/// state reward of f1, which is still paid as a state reward). The initial
/// transitions earn the probability-weighted mean over all prefixes.
template <class S>
RewardStructure transform_rewards(const PopulationDtmc<S>& full, const ReducedDtmc<S>& reduced,
                                  const RewardStructure& rewards) {
    rewards.check_aligned(full.chain);
    const auto& D = full.chain;
    const auto& Dr = reduced.chain;

    // chain[x]: reward collected from x up to (excluding) its firing successor.
    std::vector<double> chain(D.num_states(), 0.0);
    for (StateIndex x = 1; x < D.num_states(); ++x) {
        if (full.state(x).is_firing()) continue;
        double total = 0;
        StateIndex cur = x;
        while (!full.state(cur).is_firing()) {
            const auto r = D.row(cur);
            if (r.size() != 1) throw Error("non-firing state with more than one successor");
            total += rewards.state[cur] + rewards.transition[D.row_begin(cur)];
            cur = r[0].target;
        }
        chain[x] = total;
    }

    RewardStructure out = RewardStructure::zero(Dr);
    for (std::size_t i = 0; i < reduced.states.size(); ++i) {
        out.state[i + 1] = rewards.state[full.index_of(reduced.states[i])];
    }

    auto transform_row = [&](StateIndex from_full, StateIndex from_reduced, double source_reward) {
        std::vector<double> weighted(Dr.row(from_reduced).size(), 0.0);
        std::vector<double> mass(weighted.size(), 0.0);
        const auto row = D.row(from_full);
        for (std::size_t j = 0; j < row.size(); ++j) {
            const StateIndex x = row[j].target;
            const double prob = to_double(row[j].probability);
            const double reward = source_reward + rewards.transition[D.row_begin(from_full) + j] + chain[x];
            const std::size_t pos = Dr.find(from_reduced, reduced.provenance[x].target);
            if (pos == SparseDtmc<S>::npos) throw Error("reduced model is missing a transition");
            weighted[pos - Dr.row_begin(from_reduced)] += prob * reward;
            mass[pos - Dr.row_begin(from_reduced)] += prob;
        }
        for (std::size_t j = 0; j < weighted.size(); ++j) {
            if (mass[j] > 0) out.transition[Dr.row_begin(from_reduced) + j] = weighted[j] / mass[j];
        }
    };

    transform_row(0, 0, rewards.state[0]);
    for (std::size_t i = 0; i < reduced.states.size(); ++i) {
        transform_row(full.index_of(reduced.states[i]), i + 1, 0.0);
    }
    return out;
}

} // namespace pcosync

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
#include "pcosync/params.hpp"
#include "pcosync/scalar.hpp"

#include <algorithm>
#include <compare>
#include <functional>
#include <numeric>
#include <string>
#include <vector>

namespace pcosync {

/// Population-model state: counts[phase - 1] oscillators share each phase.
struct GlobalState {
    std::vector<int> counts;

    int count(int phase) const { return counts[static_cast<std::size_t>(phase - 1)]; }
    int phases() const noexcept { return static_cast<int>(counts.size()); }
    int population() const { return std::accumulate(counts.begin(), counts.end(), 0); }

    /// Some oscillator sits at phase T and fires in the next step.
    bool is_firing() const { return !counts.empty() && counts.back() > 0; }

    bool is_synchronised() const {
        const int n = population();
        return n > 0 && std::any_of(counts.begin(), counts.end(), [n](int k) { return k == n; });
    }

    std::string to_string() const {
        std::string out = "<";
        for (std::size_t i = 0; i < counts.size(); ++i) {
            if (i) out += ",";
            out += std::to_string(counts[i]);
        }
        return out + ">";
    }

    friend auto operator<=>(const GlobalState&, const GlobalState&) = default;
};

/// Marks a phase whose group does not fire.
inline constexpr int kStar = -1;

/// Per-phase broadcast failure counts; kStar entries form a prefix.
struct FailureVector {
    std::vector<int> entries;

    static FailureVector all_star(int T) { return {std::vector<int>(static_cast<std::size_t>(T), kStar)}; }

    int at(int phase) const { return entries[static_cast<std::size_t>(phase - 1)]; }
    bool is_star(int phase) const { return at(phase) == kStar; }

    bool has_star_prefix() const {
        bool seen_value = false;
        for (int f : entries) {
            if (f == kStar && seen_value) return false;
            if (f != kStar) seen_value = true;
        }
        return true;
    }

    std::string to_string() const {
        std::string out = "<";
        for (std::size_t i = 0; i < entries.size(); ++i) {
            if (i) out += ",";
            out += entries[i] == kStar ? std::string("*") : std::to_string(entries[i]);
        }
        return out + ">";
    }

    friend auto operator<=>(const FailureVector&, const FailureVector&) = default;
};

/// alpha, update and fire for every phase of a (state, failure vector) pair,
/// indexed by phase - 1.
struct PhaseTrace {
    std::vector<int> alpha;
    std::vector<int> updated;
    std::vector<bool> fires;
};

inline void check_shapes(const GlobalState& s, const FailureVector& f, const ModelParams& p) {
    if (s.phases() != p.T || static_cast<int>(f.entries.size()) != p.T) {
        throw Error("state and failure vector must have T = " + std::to_string(p.T) + " entries");
    }
}

/// Descending recursion from phase T: alpha^T = 0, and a firing group adds its
/// successful broadcasts to the alpha of every lower phase.
inline PhaseTrace trace(const GlobalState& s, const FailureVector& f, const ModelParams& p) {
    check_shapes(s, f, p);
    const auto T = static_cast<std::size_t>(p.T);
    PhaseTrace out{std::vector<int>(T), std::vector<int>(T), std::vector<bool>(T)};
    int a = 0;
    for (int phase = p.T; phase >= 1; --phase) {
        const auto i = static_cast<std::size_t>(phase - 1);
        out.alpha[i] = a;
        out.updated[i] = 1 + refr(phase, pert(phase, a, p.epsilon, p.prf), p.R);
        out.fires[i] = out.updated[i] > p.T;
        if (!f.is_star(phase) && out.fires[i]) a += s.count(phase) - f.at(phase);
    }
    return out;
}

inline int alpha(const GlobalState& s, const FailureVector& f, int phase, const ModelParams& p) {
    return trace(s, f, p).alpha[static_cast<std::size_t>(phase - 1)];
}

struct PhaseUpdate {
    int updated;
    bool fires;
};

inline PhaseUpdate update_fire(const GlobalState& s, const FailureVector& f, int phase, const ModelParams& p) {
    const auto t = trace(s, f, p);
    const auto i = static_cast<std::size_t>(phase - 1);
    return {t.updated[i], t.fires[i]};
}

/// Phase that the group at `phase` moves to in the next step.
inline int tau(const GlobalState& s, int phase, const FailureVector& f, const ModelParams& p) {
    const auto u = update_fire(s, f, phase, p);
    return u.fires ? 1 : u.updated;
}

inline GlobalState successor(const GlobalState& s, const FailureVector& f, const ModelParams& p) {
    const auto t = trace(s, f, p);
    GlobalState next{std::vector<int>(static_cast<std::size_t>(p.T), 0)};
    for (int phase = 1; phase <= p.T; ++phase) {
        const auto i = static_cast<std::size_t>(phase - 1);
        const int target = t.fires[i] ? 1 : t.updated[i];
        next.counts[static_cast<std::size_t>(target - 1)] += s.count(phase);
    }
    return next;
}

/// Visits every possible failure vector of `s` in the order of the fail_T
/// recursion. The callback receives a buffer that is reused between calls.
inline void for_each_failure_vector(const GlobalState& s, const ModelParams& p,
                                    const std::function<void(const FailureVector&)>& visit) {
    FailureVector f = FailureVector::all_star(p.T);
    if (!s.is_firing()) {
        visit(f);
        return;
    }
    // Depth-first over phases T..1; `a` is alpha at `phase`.
    std::function<void(int, int)> descend = [&](int phase, int a) {
        const int updated = 1 + refr(phase, pert(phase, a, p.epsilon, p.prf), p.R);
        const auto i = static_cast<std::size_t>(phase - 1);
        if (updated <= p.T) {
            // Group does not fire; lower groups cannot fire either.
            for (int q = 1; q <= phase; ++q) f.entries[static_cast<std::size_t>(q - 1)] = kStar;
            visit(f);
            return;
        }
        const int k = s.count(phase);
        for (int failures = 0; failures <= k; ++failures) {
            f.entries[i] = failures;
            if (phase == 1) {
                visit(f);
            } else {
                descend(phase - 1, a + k - failures);
            }
        }
    };
    descend(p.T, 0);
}

inline std::vector<FailureVector> enumerate_failure_vectors(const GlobalState& s, const ModelParams& p) {
    std::vector<FailureVector> out;
    for_each_failure_vector(s, p, [&](const FailureVector& f) { out.push_back(f); });
    return out;
}

/// Probability of f broadcast failures among k firing oscillators.
template <class S>
S pfail(int k, int f, const S& mu) {
    if (f < 0 || f > k) {
        throw Error("pfail: failures " + std::to_string(f) + " out of range 0.." + std::to_string(k));
    }
    return power(mu, f) * power(S(1) - mu, k - f) * binomial<S>(k, f);
}

template <class S>
S pfailvec(const GlobalState& s, const FailureVector& f, const S& mu) {
    S p(1);
    for (int phase = 1; phase <= s.phases(); ++phase) {
        if (!f.is_star(phase)) p *= pfail(s.count(phase), f.at(phase), mu);
    }
    return p;
}

/// Multinomial(N; k_1..k_T) / T^N: chance that independent uniform phases
/// produce this configuration.
template <class S>
S initial_probability(const GlobalState& s, const ModelParams& p) {
    S ways(1);
    int remaining = s.population();
    for (int k : s.counts) {
        ways *= binomial<S>(remaining, k);
        remaining -= k;
    }
    return ways / power(S(p.T), s.population());
}

/// All weak compositions of N into T parts, in lexicographic order.
inline std::vector<GlobalState> enumerate_global_states(const ModelParams& p) {
    std::vector<GlobalState> out;
    out.reserve(static_cast<std::size_t>(binomial_u64(static_cast<unsigned>(p.N + p.T - 1), static_cast<unsigned>(p.N))));
    std::vector<int> counts(static_cast<std::size_t>(p.T), 0);
    std::function<void(int, int)> fill = [&](int index, int remaining) {
        if (index == p.T - 1) {
            counts[static_cast<std::size_t>(index)] = remaining;
            out.push_back({counts});
            return;
        }
        for (int k = 0; k <= remaining; ++k) {
            counts[static_cast<std::size_t>(index)] = k;
            fill(index + 1, remaining - k);
        }
    };
    fill(0, p.N);
    return out;
}

/// Population DTMC. Index 0 is the unconfigured initial state; index i >= 1
/// is states[i - 1]. Labels: "init", "synch" (some k_phase = N) and
/// "synch_fire" (k_T = N).
template <class S>
struct PopulationDtmc {
    ModelParams params;
    std::vector<GlobalState> states;
    SparseDtmc<S> chain;

    static constexpr StateIndex initial_index = 0;

    const GlobalState& state(StateIndex index) const { return states.at(index - 1); }

    StateIndex index_of(const GlobalState& s) const {
        auto it = std::lower_bound(states.begin(), states.end(), s);
        if (it == states.end() || *it != s) throw Error("not a state of this model: " + s.to_string());
        return static_cast<StateIndex>(it - states.begin()) + 1;
    }
};

template <class S>
void label_synchronised(SparseDtmc<S>& chain, const std::vector<GlobalState>& states, int N) {
    StateSet init(chain.num_states(), false), synch(chain.num_states(), false), fire(chain.num_states(), false);
    init[0] = true;
    for (std::size_t i = 0; i < states.size(); ++i) {
        synch[i + 1] = states[i].is_synchronised();
        fire[i + 1] = states[i].counts.back() == N;
    }
    chain.set_label("init", std::move(init));
    chain.set_label("synch", std::move(synch));
    chain.set_label("synch_fire", std::move(fire));
}

template <class S = double>
PopulationDtmc<S> build_population_dtmc(const ModelParams& p) {
    validate(p);
    PopulationDtmc<S> model;
    model.params = p;
    model.states = enumerate_global_states(p);
    const S mu = from_double<S>(p.mu);

    DtmcBuilder<S> builder(model.states.size() + 1);
    for (std::size_t i = 0; i < model.states.size(); ++i) {
        builder.add(i + 1, initial_probability<S>(model.states[i], p));
    }
    builder.finish_row();

    for (const auto& s : model.states) {
        for_each_failure_vector(s, p, [&](const FailureVector& f) {
            builder.add(model.index_of(successor(s, f, p)), pfailvec(s, f, mu));
        });
        builder.finish_row();
    }
    model.chain = std::move(builder).build(0);
    label_synchronised(model.chain, model.states, p.N);
    return model;
}

} // namespace pcosync

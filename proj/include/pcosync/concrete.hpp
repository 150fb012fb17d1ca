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

// Concrete model: every oscillator is tracked individually, together with an
// environment counter of successful broadcasts in the current round. A round
// is: counter reset, one start -> update step per oscillator (highest phase
// first once something fires), then a simultaneous phase update.

#include "pcosync/dtmc.hpp"
#include "pcosync/error.hpp"
#include "pcosync/params.hpp"
#include "pcosync/scalar.hpp"

#include <algorithm>
#include <bit>
#include <cstdint>
#include <deque>
#include <optional>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

namespace pcosync {

enum class Mode : std::uint8_t { Start = 0, Update = 1 };

struct Oscillator {
    int phase = 1;
    Mode mode = Mode::Start;

    friend auto operator<=>(const Oscillator&, const Oscillator&) = default;
};

struct ConcreteState {
    Mode env_mode = Mode::Start;
    int counter = 0;
    std::vector<Oscillator> oscillators;

    /// Environment and all oscillators in start mode (the states h is defined on).
    bool is_round_start() const {
        return env_mode == Mode::Start &&
               std::all_of(oscillators.begin(), oscillators.end(), [](const Oscillator& o) { return o.mode == Mode::Start; });
    }

    bool is_synchronised() const {
        return std::all_of(oscillators.begin(), oscillators.end(),
                           [&](const Oscillator& o) { return o.phase == oscillators.front().phase; });
    }

    std::string to_string() const {
        auto m = [](Mode x) { return x == Mode::Start ? "s" : "u"; };
        std::string out = "(" + std::to_string(counter) + m(env_mode) + "|";
        for (std::size_t i = 0; i < oscillators.size(); ++i) {
            if (i) out += ",";
            out += std::to_string(oscillators[i].phase) + m(oscillators[i].mode);
        }
        return out + ")";
    }

    friend auto operator<=>(const ConcreteState&, const ConcreteState&) = default;
};

/// Bit packing of concrete states into 64-bit keys.
class ConcreteLayout {
public:
    ConcreteLayout(int N, int T)
        : N_(N), phase_bits_(std::max(1, static_cast<int>(std::bit_width(static_cast<unsigned>(T - 1))))),
          counter_bits_(static_cast<int>(std::bit_width(static_cast<unsigned>(N)))) {
        if (1 + counter_bits_ + N * (1 + phase_bits_) > 64) {
            throw Error("concrete state of " + std::to_string(N) + " oscillators does not fit a 64-bit key");
        }
    }

    std::uint64_t encode(const ConcreteState& s) const {
        std::uint64_t key = static_cast<std::uint64_t>(s.env_mode);
        int shift = 1;
        key |= static_cast<std::uint64_t>(s.counter) << shift;
        shift += counter_bits_;
        for (const auto& o : s.oscillators) {
            key |= static_cast<std::uint64_t>(o.mode) << shift;
            key |= static_cast<std::uint64_t>(o.phase - 1) << (shift + 1);
            shift += 1 + phase_bits_;
        }
        return key;
    }

    ConcreteState decode(std::uint64_t key) const {
        ConcreteState s;
        s.env_mode = static_cast<Mode>(key & 1u);
        int shift = 1;
        s.counter = static_cast<int>((key >> shift) & mask(counter_bits_));
        shift += counter_bits_;
        s.oscillators.resize(static_cast<std::size_t>(N_));
        for (auto& o : s.oscillators) {
            o.mode = static_cast<Mode>((key >> shift) & 1u);
            o.phase = static_cast<int>((key >> (shift + 1)) & mask(phase_bits_)) + 1;
            shift += 1 + phase_bits_;
        }
        return s;
    }

private:
    static std::uint64_t mask(int bits) { return bits >= 64 ? ~0ull : ((1ull << bits) - 1); }

    int N_;
    int phase_bits_;
    int counter_bits_;
};

namespace detail {

/// The oscillator model's firing predicate: 1 + refr(phase, pert(phase, c)) > T.
inline int concrete_update(int phase, int counter, const ModelParams& p) {
    return 1 + refr(phase, pert(phase, counter, p.epsilon, p.prf), p.R);
}

} // namespace detail

/// Successors of a concrete state with their probabilities.
template <class S = double>
std::vector<std::pair<ConcreteState, S>> concrete_transitions(const ConcreteState& s, const ModelParams& p) {
    std::vector<std::pair<ConcreteState, S>> out;
    const S mu = from_double<S>(p.mu);
    auto emit = [&](ConcreteState next, const S& prob) {
        if (prob != S(0)) out.emplace_back(std::move(next), prob);
    };

    if (s.env_mode == Mode::Start) {
        // (2) counter reset
        ConcreteState next = s;
        next.env_mode = Mode::Update;
        next.counter = 0;
        emit(std::move(next), S(1));
        return out;
    }

    std::vector<std::size_t> waiting;
    for (std::size_t u = 0; u < s.oscillators.size(); ++u) {
        if (s.oscillators[u].mode == Mode::Start) waiting.push_back(u);
    }

    if (waiting.empty()) {
        // (8) simultaneous phase update
        ConcreteState next = s;
        next.env_mode = Mode::Start;
        next.counter = 0;
        for (auto& o : next.oscillators) {
            o.mode = Mode::Start;
            if (o.phase == p.T) {
                o.phase = 1;
            } else {
                const int updated = detail::concrete_update(o.phase, s.counter, p);
                o.phase = updated > p.T ? 1 : updated;
            }
        }
        emit(std::move(next), S(1));
        return out;
    }

    auto mark = [&](std::size_t w, int counter_delta) {
        ConcreteState next = s;
        next.oscillators[w].mode = Mode::Update;
        next.counter += counter_delta;
        return next;
    };

    const bool someone_at_T = std::any_of(s.oscillators.begin(), s.oscillators.end(),
                                          [&](const Oscillator& o) { return o.phase == p.T; });
    if (!someone_at_T) {
        // (5) nothing fires this round; any order
        const S share = S(1) / S(static_cast<int>(waiting.size()));
        for (std::size_t w : waiting) emit(mark(w, 0), share);
        return out;
    }

    int top = 0;
    for (std::size_t w : waiting) top = std::max(top, s.oscillators[w].phase);
    std::vector<std::size_t> group;
    for (std::size_t w : waiting) {
        if (s.oscillators[w].phase == top) group.push_back(w);
    }
    const S share = S(1) / S(static_cast<int>(group.size()));

    const bool fires = top == p.T || detail::concrete_update(top, s.counter, p) > p.T;
    for (std::size_t w : group) {
        if (fires) {
            // (3)/(7b) broadcast succeeds, (4)/(7a) broadcast fails
            emit(mark(w, 1), (S(1) - mu) * share);
            emit(mark(w, 0), mu * share);
        } else {
            // (6) perturbed, does not fire
            emit(mark(w, 0), share);
        }
    }
    return out;
}

/// A weighted phase assignment for the initial transition.
template <class S>
using InitialDistribution = std::vector<std::pair<std::vector<int>, S>>;

/// Every phase assignment in 1..T^N with probability 1/T^N, in lexicographic order.
template <class S = double>
InitialDistribution<S> uniform_phase_assignments(const ModelParams& p) {
    InitialDistribution<S> out;
    const S share = S(1) / power(S(p.T), p.N);
    std::vector<int> phases(static_cast<std::size_t>(p.N), 1);
    while (true) {
        out.emplace_back(phases, share);
        int i = p.N - 1;
        while (i >= 0 && phases[static_cast<std::size_t>(i)] == p.T) phases[static_cast<std::size_t>(i--)] = 1;
        if (i < 0) break;
        ++phases[static_cast<std::size_t>(i)];
    }
    return out;
}

inline constexpr std::size_t kDefaultStateBudget = 5'000'000;

/// Upper bound on the concrete state count: round-start states, plus every
/// mode subset and counter value with the environment in update mode.
inline double concrete_state_bound(int N, int T) {
    double assignments = 1;
    for (int i = 0; i < N; ++i) assignments *= T;
    double subsets = 1;
    for (int i = 0; i < N; ++i) subsets *= 2;
    return 1 + assignments * (1 + subsets * (N + 1));
}

/// Concrete DTMC. Index 0 is the initial state that assigns phases; index
/// i >= 1 is decode(keys[i - 1]). Labels: "init", "synch" (all phases equal)
/// and "round_start".
template <class S>
struct ConcreteDtmc {
    ModelParams params;
    ConcreteLayout layout{1, 1};
    std::vector<std::uint64_t> keys;
    SparseDtmc<S> chain;

    ConcreteState state(StateIndex index) const { return layout.decode(keys.at(index - 1)); }
};

template <class S = double>
ConcreteDtmc<S> build_concrete_dtmc(const ModelParams& p, const InitialDistribution<S>& initial,
                                    std::size_t budget = kDefaultStateBudget) {
    validate(p);
    ConcreteDtmc<S> model;
    model.params = p;
    model.layout = ConcreteLayout(p.N, p.T);

    std::unordered_map<std::uint64_t, StateIndex> index;
    auto intern = [&](const ConcreteState& s) {
        const auto key = model.layout.encode(s);
        auto [it, inserted] = index.try_emplace(key, model.keys.size() + 1);
        if (inserted) {
            if (model.keys.size() + 2 > budget) {
                throw BudgetExceeded(budget, "concrete model with N = " + std::to_string(p.N) +
                                                 ", T = " + std::to_string(p.T));
            }
            model.keys.push_back(key);
        }
        return it->second;
    };

    DtmcBuilder<S> builder;
    for (const auto& [phases, prob] : initial) {
        if (static_cast<int>(phases.size()) != p.N) throw Error("initial phase assignment must have N entries");
        ConcreteState s;
        for (int phase : phases) {
            if (phase < 1 || phase > p.T) throw Error("initial phase out of range 1..T");
            s.oscillators.push_back({phase, Mode::Start});
        }
        builder.add(intern(s), prob);
    }
    builder.finish_row();

    for (std::size_t next = 0; next < model.keys.size(); ++next) {
        const ConcreteState s = model.layout.decode(model.keys[next]);
        for (const auto& [target, prob] : concrete_transitions<S>(s, p)) builder.add(intern(target), prob);
        builder.finish_row();
    }
    model.chain = std::move(builder).build(0);

    StateSet init(model.chain.num_states(), false), synch(model.chain.num_states(), false),
        round_start(model.chain.num_states(), false);
    init[0] = true;
    for (std::size_t i = 0; i < model.keys.size(); ++i) {
        const auto s = model.layout.decode(model.keys[i]);
        synch[i + 1] = s.is_synchronised();
        round_start[i + 1] = s.is_round_start();
    }
    model.chain.set_label("init", std::move(init));
    model.chain.set_label("synch", std::move(synch));
    model.chain.set_label("round_start", std::move(round_start));
    return model;
}

template <class S = double>
ConcreteDtmc<S> build_concrete_dtmc(const ModelParams& p, std::size_t budget = kDefaultStateBudget) {
    return build_concrete_dtmc<S>(p, uniform_phase_assignments<S>(p), budget);
}

} // namespace pcosync

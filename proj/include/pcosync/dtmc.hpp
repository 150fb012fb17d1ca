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

#include "pcosync/error.hpp"
#include "pcosync/scalar.hpp"

#include <algorithm>
#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace pcosync {

using StateIndex = std::size_t;
using StateSet = std::vector<bool>;

template <class S>
struct Transition {
    StateIndex target;
    S probability;

    friend bool operator==(const Transition&, const Transition&) = default;
};

/// Immutable DTMC in compressed sparse row form. Rows are sorted by target
/// and hold no duplicate targets.
template <class S>
class SparseDtmc {
public:
    SparseDtmc() = default;

    std::size_t num_states() const noexcept { return offsets_.empty() ? 0 : offsets_.size() - 1; }
    std::size_t num_transitions() const noexcept { return entries_.size(); }
    StateIndex initial() const noexcept { return initial_; }

    std::span<const Transition<S>> row(StateIndex s) const {
        return {entries_.data() + offsets_[s], entries_.data() + offsets_[s + 1]};
    }

    /// Offset of the first entry of row s in the flat entry array; transition
    /// rewards are stored aligned with this array.
    std::size_t row_begin(StateIndex s) const noexcept { return offsets_[s]; }
    std::span<const Transition<S>> entries() const noexcept { return entries_; }

    /// Probability of s -> t, zero when absent.
    S probability(StateIndex s, StateIndex t) const {
        const auto r = row(s);
        auto it = std::lower_bound(r.begin(), r.end(), t,
                                   [](const Transition<S>& e, StateIndex x) { return e.target < x; });
        return (it != r.end() && it->target == t) ? it->probability : S(0);
    }

    /// Position of s -> t in the entry array, or npos.
    std::size_t find(StateIndex s, StateIndex t) const {
        const auto r = row(s);
        auto it = std::lower_bound(r.begin(), r.end(), t,
                                   [](const Transition<S>& e, StateIndex x) { return e.target < x; });
        if (it == r.end() || it->target != t) return npos;
        return offsets_[s] + static_cast<std::size_t>(it - r.begin());
    }

    const std::map<std::string, StateSet>& labels() const noexcept { return labels_; }
    bool has_label(const std::string& name) const { return labels_.count(name) != 0; }

    const StateSet& label(const std::string& name) const {
        auto it = labels_.find(name);
        if (it == labels_.end()) throw Error("unknown label \"" + name + "\"");
        return it->second;
    }

    void set_label(const std::string& name, StateSet states) {
        states.resize(num_states(), false);
        labels_[name] = std::move(states);
    }

    S row_sum(StateIndex s) const {
        S sum(0);
        for (const auto& e : row(s)) sum += e.probability;
        return sum;
    }

    template <class T>
    SparseDtmc<T> convert() const {
        SparseDtmc<T> out;
        out.offsets_ = offsets_;
        out.initial_ = initial_;
        out.labels_ = labels_;
        out.entries_.reserve(entries_.size());
        for (const auto& e : entries_) {
            if constexpr (std::is_same_v<T, double>) {
                out.entries_.push_back({e.target, to_double(e.probability)});
            } else {
                out.entries_.push_back({e.target, static_cast<T>(e.probability)});
            }
        }
        return out;
    }

    friend bool operator==(const SparseDtmc&, const SparseDtmc&) = default;

    static constexpr std::size_t npos = static_cast<std::size_t>(-1);

private:
    template <class>
    friend class DtmcBuilder;
    template <class>
    friend class SparseDtmc;

    std::vector<std::size_t> offsets_;
    std::vector<Transition<S>> entries_;
    StateIndex initial_ = 0;
    std::map<std::string, StateSet> labels_;
};

/// Builds a SparseDtmc row by row. Rows must be added in index order; within a
/// row, transitions to the same target are summed.
template <class S>
class DtmcBuilder {
public:
    explicit DtmcBuilder(std::size_t expected_states = 0) {
        dtmc_.offsets_.reserve(expected_states + 1);
        dtmc_.offsets_.push_back(0);
    }

    /// Zero-probability transitions are dropped.
    void add(StateIndex target, const S& probability) {
        if (probability == S(0)) return;
        pending_.push_back({target, probability});
    }

    /// Closes the current row, merging duplicate targets.
    void finish_row() {
        std::sort(pending_.begin(), pending_.end(),
                  [](const Transition<S>& a, const Transition<S>& b) { return a.target < b.target; });
        for (auto& e : pending_) {
            auto& out = dtmc_.entries_;
            if (out.size() > dtmc_.offsets_.back() && out.back().target == e.target) {
                out.back().probability += e.probability;
            } else {
                out.push_back(std::move(e));
            }
        }
        pending_.clear();
        dtmc_.offsets_.push_back(dtmc_.entries_.size());
    }

    std::size_t rows() const noexcept { return dtmc_.offsets_.size() - 1; }

    SparseDtmc<S> build(StateIndex initial) && {
        dtmc_.initial_ = initial;
        return std::move(dtmc_);
    }

private:
    SparseDtmc<S> dtmc_;
    std::vector<Transition<S>> pending_;
};

/// State and transition rewards. Transition rewards are aligned with the
/// entry array of the DTMC they belong to, so their support is always a
/// subset of the transition support.
struct RewardStructure {
    std::vector<double> state;
    std::vector<double> transition;

    template <class S>
    static RewardStructure zero(const SparseDtmc<S>& dtmc) {
        return {std::vector<double>(dtmc.num_states(), 0.0), std::vector<double>(dtmc.num_transitions(), 0.0)};
    }

    template <class S>
    double transition_reward(const SparseDtmc<S>& dtmc, StateIndex s, StateIndex t) const {
        const std::size_t pos = dtmc.find(s, t);
        if (pos == SparseDtmc<S>::npos) {
            throw Error("no transition " + std::to_string(s) + " -> " + std::to_string(t) + " in the model");
        }
        return transition[pos];
    }

    template <class S>
    void check_aligned(const SparseDtmc<S>& dtmc) const {
        if (state.size() != dtmc.num_states() || transition.size() != dtmc.num_transitions()) {
            throw Error("reward structure does not match the model dimensions");
        }
    }
};

} // namespace pcosync

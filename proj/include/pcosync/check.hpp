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
#include "pcosync/pctl.hpp"
#include "pcosync/solvers.hpp"

#include <algorithm>

namespace pcosync {

struct EvalResult {
    bool query = false;
    double value = 0;  ///< query value at the initial state (may be infinite)
    bool holds = false; ///< boolean formulas: satisfied in the initial state
    StateSet satisfied;
    double residual = 0;
    std::size_t iterations = 0;
};

/// Bottom-up PCTL evaluation over a double-precision DTMC.
class PctlChecker {
public:
    explicit PctlChecker(const SparseDtmc<double>& dtmc, const RewardStructure* rewards = nullptr,
                         SolveOptions opts = {})
        : d_(dtmc), rewards_(rewards), opts_(opts) {}

    EvalResult evaluate(const PctlFormula& f) {
        residual_ = 0;
        iterations_ = 0;
        EvalResult out;
        if (f.is_query()) {
            out.query = true;
            out.value = values(f)[d_.initial()];
        } else {
            out.satisfied = sat(f);
            out.holds = out.satisfied[d_.initial()];
            out.value = out.holds ? 1.0 : 0.0;
        }
        out.residual = residual_;
        out.iterations = iterations_;
        return out;
    }

    StateSet sat(const PctlFormula& f) {
        const std::size_t n = d_.num_states();
        switch (f.kind) {
        case PctlFormula::Kind::True: return StateSet(n, true);
        case PctlFormula::Kind::False: return StateSet(n, false);
        case PctlFormula::Kind::Atom: return d_.label(f.label);
        case PctlFormula::Kind::Not: {
            auto s = sat(*f.lhs);
            s.flip();
            return s;
        }
        case PctlFormula::Kind::And:
        case PctlFormula::Kind::Or:
        case PctlFormula::Kind::Implies: {
            const auto a = sat(*f.lhs);
            const auto b = sat(*f.rhs);
            StateSet out(n);
            for (std::size_t s = 0; s < n; ++s) {
                out[s] = f.kind == PctlFormula::Kind::And ? (a[s] && b[s])
                         : f.kind == PctlFormula::Kind::Or ? (a[s] || b[s])
                                                           : (!a[s] || b[s]);
            }
            return out;
        }
        case PctlFormula::Kind::Prob:
        case PctlFormula::Kind::Reward: {
            if (!f.bound) throw Error("a =? query can only appear at the top level");
            const auto v = values(f);
            StateSet out(n);
            for (std::size_t s = 0; s < n; ++s) out[s] = compare(v[s], f.bound->op, f.bound->value);
            return out;
        }
        }
        throw Error("unhandled formula");
    }

    /// Per-state probabilities (P) or expected rewards (R).
    std::vector<double> values(const PctlFormula& f) {
        if (f.kind == PctlFormula::Kind::Reward) {
            if (!rewards_) throw Error("reward operator requires a reward structure");
            auto r = expected_reward(d_, *rewards_, sat(*f.lhs), opts_);
            record(r);
            return r.values;
        }
        if (f.kind != PctlFormula::Kind::Prob) throw Error("not a P or R operator: " + to_string(f));
        const auto& p = f.path;
        if (p.kind == PathFormula::Kind::Next) return prob_next(d_, sat(*p.right));
        const auto a = sat(*p.left);
        const auto b = sat(*p.right);
        if (p.steps) return prob_bounded_until(d_, a, b, *p.steps);
        auto r = prob_unbounded_until(d_, a, b, opts_);
        record(r);
        return r.values;
    }

private:
    void record(const SolveResult& r) {
        residual_ = std::max(residual_, r.residual);
        iterations_ += r.iterations;
    }

    const SparseDtmc<double>& d_;
    const RewardStructure* rewards_;
    SolveOptions opts_;
    double residual_ = 0;
    std::size_t iterations_ = 0;
};

inline EvalResult evaluate(const SparseDtmc<double>& dtmc, const PctlFormula& f,
                           const RewardStructure* rewards = nullptr, SolveOptions opts = {}) {
    return PctlChecker(dtmc, rewards, opts).evaluate(f);
}

} // namespace pcosync

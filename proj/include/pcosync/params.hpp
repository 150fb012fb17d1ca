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

#include <cmath>
#include <string>
#include <utility>
#include <vector>

namespace pcosync {

/// Phase response function: maps (phase, perceived firings, coupling) to a
/// nonnegative integer perturbation. `Linear` is [phase * alpha * epsilon]
/// with half-away-from-zero rounding; `Table` is a user-supplied dense grid
/// indexed by phase 1..T (rows) and alpha 0..N (columns).
class PhaseResponse {
public:
    enum class Kind { Linear, Table };

    PhaseResponse() = default;

    static PhaseResponse linear() { return PhaseResponse{}; }

    static PhaseResponse table(std::vector<std::vector<int>> values) {
        PhaseResponse prf;
        prf.kind_ = Kind::Table;
        prf.table_ = std::move(values);
        return prf;
    }

    Kind kind() const noexcept { return kind_; }
    const std::vector<std::vector<int>>& values() const noexcept { return table_; }

    int operator()(int phase, int alpha, double epsilon) const {
        if (kind_ == Kind::Linear) {
            return static_cast<int>(std::round(static_cast<double>(phase) * alpha * epsilon));
        }
        if (phase < 1 || static_cast<std::size_t>(phase) > table_.size()) {
            throw ParamError("prf", "no table row for phase " + std::to_string(phase));
        }
        const auto& row = table_[static_cast<std::size_t>(phase - 1)];
        if (alpha < 0 || static_cast<std::size_t>(alpha) >= row.size()) {
            throw ParamError("prf", "no table entry for phase " + std::to_string(phase) + ", alpha " +
                                        std::to_string(alpha));
        }
        return row[static_cast<std::size_t>(alpha)];
    }

    friend bool operator==(const PhaseResponse&, const PhaseResponse&) = default;

private:
    Kind kind_ = Kind::Linear;
    std::vector<std::vector<int>> table_;
};

/// Full parameter tuple of a network of pulse-coupled oscillators.
struct ModelParams {
    int N = 1;          ///< number of oscillators
    int T = 1;          ///< cycle length (phases 1..T)
    int R = 0;          ///< refractory period [1, R]
    double epsilon = 0; ///< coupling strength
    double mu = 0;      ///< broadcast failure probability
    PhaseResponse prf;

    friend bool operator==(const ModelParams&, const ModelParams&) = default;
};

inline int pert(int phase, int alpha, double epsilon, const PhaseResponse& prf) {
    return prf(phase, alpha, epsilon);
}

/// Refractory function: identity on [1, R], phase + delta elsewhere.
inline int refr(int phase, int delta, int R) { return phase <= R ? phase : phase + delta; }

/// Throws ParamError naming the first violated bound.
inline void validate(const ModelParams& p) {
    if (p.N < 1) throw ParamError("N", "must be at least 1");
    if (p.T < 1) throw ParamError("T", "must be at least 1");
    if (p.R < 0) throw ParamError("R", "must be nonnegative");
    if (p.R > p.T) throw ParamError("R", "R exceeds T");
    if (!(p.epsilon >= 0) || !std::isfinite(p.epsilon)) throw ParamError("epsilon", "must be a finite nonnegative real");
    if (!(p.mu >= 0 && p.mu <= 1)) throw ParamError("mu", "mu out of [0,1]");

    for (int phase = 1; phase <= p.T; ++phase) {
        if (p.prf.kind() == PhaseResponse::Kind::Table) {
            const auto& rows = p.prf.values();
            if (rows.size() != static_cast<std::size_t>(p.T)) {
                throw ParamError("prf", "table must have T = " + std::to_string(p.T) + " rows");
            }
            if (rows[static_cast<std::size_t>(phase - 1)].size() != static_cast<std::size_t>(p.N + 1)) {
                throw ParamError("prf", "table row " + std::to_string(phase) + " must have N + 1 = " +
                                            std::to_string(p.N + 1) + " entries");
            }
        }
        int previous = 0;
        for (int alpha = 0; alpha <= p.N; ++alpha) {
            const int value = pert(phase, alpha, p.epsilon, p.prf);
            if (value < 0) {
                throw ParamError("prf", "negative perturbation at phase " + std::to_string(phase));
            }
            if (alpha == 0 && value != 0) {
                throw ParamError("prf", "perturbation must be 0 for alpha = 0 (phase " + std::to_string(phase) + ")");
            }
            if (value < previous) {
                throw ParamError("prf", "perturbation decreases in alpha at phase " + std::to_string(phase));
            }
            previous = value;
        }
    }
}

} // namespace pcosync

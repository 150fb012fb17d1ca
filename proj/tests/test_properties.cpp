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

// Randomised invariants over 50 seeded parameter draws.

#include "pcosync/concrete.hpp"
#include "pcosync/population.hpp"
#include "pcosync/reduction.hpp"

#include <gtest/gtest.h>

#include <random>
#include <set>

namespace pcosync {
namespace {

constexpr int kSeeds = 50;

ModelParams draw(std::uint64_t seed, int max_n, int max_t) {
    std::mt19937_64 rng(seed);
    ModelParams p;
    p.N = std::uniform_int_distribution<int>(1, max_n)(rng);
    p.T = std::uniform_int_distribution<int>(2, max_t)(rng);
    p.R = std::uniform_int_distribution<int>(0, p.T)(rng);
    p.epsilon = std::uniform_real_distribution<double>(0.0, 0.5)(rng);
    p.mu = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
    return p;
}

// Declarative characterisation of the admissible failure vectors, checked
// over every vector in {*, 0..N}^T.
bool admissible(const GlobalState& s, const FailureVector& f, const ModelParams& p) {
    if (!f.has_star_prefix()) return false;
    if (!s.is_firing()) return f == FailureVector::all_star(p.T);
    const auto t = trace(s, f, p);
    bool above_fired = true;
    for (int phase = p.T; phase >= 1; --phase) {
        const bool fires = above_fired && t.fires[static_cast<std::size_t>(phase - 1)];
        if (fires != !f.is_star(phase)) return false;
        if (fires && f.at(phase) > s.count(phase)) return false;
        above_fired = fires;
    }
    return true;
}

std::set<FailureVector> brute_force(const GlobalState& s, const ModelParams& p) {
    std::set<FailureVector> out;
    std::vector<int> digits(static_cast<std::size_t>(p.T), kStar);
    while (true) {
        FailureVector f{digits};
        if (admissible(s, f, p)) out.insert(f);
        std::size_t i = 0;
        while (i < digits.size() && digits[i] == p.N) digits[i++] = kStar;
        if (i == digits.size()) break;
        ++digits[i];
    }
    return out;
}

TEST(Properties, SuccessorsConserveOscillators) {
    for (int seed = 0; seed < kSeeds; ++seed) {
        const auto p = draw(static_cast<std::uint64_t>(seed), 5, 8);
        for (const auto& s : enumerate_global_states(p)) {
            for_each_failure_vector(s, p, [&](const FailureVector& f) {
                EXPECT_EQ(successor(s, f, p).population(), p.N) << "seed " << seed << " " << s.to_string();
            });
        }
    }
}

TEST(Properties, RowsSumToOne) {
    for (int seed = 0; seed < kSeeds; ++seed) {
        const auto p = draw(100 + static_cast<std::uint64_t>(seed), 5, 8);
        const auto m = build_population_dtmc(p);
        for (StateIndex s = 0; s < m.chain.num_states(); ++s) {
            EXPECT_NEAR(m.chain.row_sum(s), 1.0, 1e-12) << "seed " << seed;
        }
        const auto reduced = build_reduced_dtmc(m);
        for (StateIndex s = 0; s < reduced.chain.num_states(); ++s) {
            EXPECT_NEAR(reduced.chain.row_sum(s), 1.0, 1e-12) << "seed " << seed;
        }
    }
}

TEST(Properties, RowsSumToOneExactly) {
    for (int seed = 0; seed < kSeeds; ++seed) {
        const auto p = draw(200 + static_cast<std::uint64_t>(seed), 3, 5);
        const auto m = build_population_dtmc<Rational>(p);
        for (StateIndex s = 0; s < m.chain.num_states(); ++s) EXPECT_EQ(m.chain.row_sum(s), Rational(1)) << "seed " << seed;
        const auto c = build_concrete_dtmc<Rational>(p);
        for (StateIndex s = 0; s < c.chain.num_states(); ++s) EXPECT_EQ(c.chain.row_sum(s), Rational(1)) << "seed " << seed;
    }
}

TEST(Properties, FailureVectorsHaveStarPrefix) {
    for (int seed = 0; seed < kSeeds; ++seed) {
        const auto p = draw(300 + static_cast<std::uint64_t>(seed), 5, 8);
        for (const auto& s : enumerate_global_states(p)) {
            for_each_failure_vector(s, p, [&](const FailureVector& f) {
                EXPECT_TRUE(f.has_star_prefix()) << "seed " << seed << " " << f.to_string();
            });
        }
    }
}

TEST(Properties, FailureVectorsMatchBruteForce) {
    for (int seed = 0; seed < kSeeds; ++seed) {
        const auto p = draw(400 + static_cast<std::uint64_t>(seed), 3, 5);
        for (const auto& s : enumerate_global_states(p)) {
            const auto listed = enumerate_failure_vectors(s, p);
            const std::set<FailureVector> as_set(listed.begin(), listed.end());
            EXPECT_EQ(as_set.size(), listed.size()) << "duplicates for " << s.to_string();
            EXPECT_EQ(as_set, brute_force(s, p)) << "seed " << seed << " " << s.to_string();
        }
    }
}

TEST(Properties, FailureVectorDistribution) {
    for (int seed = 0; seed < kSeeds; ++seed) {
        const auto p = draw(500 + static_cast<std::uint64_t>(seed), 4, 6);
        const Rational mu = from_double<Rational>(p.mu);
        for (const auto& s : enumerate_global_states(p)) {
            Rational total(0);
            for_each_failure_vector(s, p, [&](const FailureVector& f) { total += pfailvec(s, f, mu); });
            EXPECT_EQ(total, Rational(1)) << "seed " << seed << " " << s.to_string();
        }
    }
}

} // namespace
} // namespace pcosync

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

#include "pcosync/population.hpp"

#include <gtest/gtest.h>

#include <set>

namespace pcosync {
namespace {

ModelParams make(int N, int T, int R, double eps, double mu) {
    ModelParams p;
    p.N = N;
    p.T = T;
    p.R = R;
    p.epsilon = eps;
    p.mu = mu;
    return p;
}

constexpr int S = kStar;

// Running example: eight oscillators, ten phases.
const ModelParams kExample = make(8, 10, 2, 0.115, 0.1);
const GlobalState kS3{{0, 0, 0, 0, 0, 2, 1, 0, 0, 5}};
const FailureVector kF3{{S, S, S, S, S, S, 1, 0, 0, 0}};

TEST(Population, ChainReactionSuccessor) {
    EXPECT_EQ(successor(kS3, kF3, kExample), (GlobalState{{6, 0, 0, 0, 0, 0, 0, 0, 0, 2}}));
}

TEST(Population, ChainReactionTrace) {
    const auto t = trace(kS3, kF3, kExample);
    EXPECT_EQ(t.alpha[9], 0);
    for (int phase = 1; phase <= 9; ++phase) EXPECT_EQ(alpha(kS3, kF3, phase, kExample), 5) << phase;
    EXPECT_EQ(update_fire(kS3, kF3, 9, kExample).updated, 15);
    EXPECT_TRUE(update_fire(kS3, kF3, 10, kExample).fires);
    EXPECT_TRUE(update_fire(kS3, kF3, 7, kExample).fires);
    EXPECT_FALSE(update_fire(kS3, kF3, 6, kExample).fires);
    EXPECT_EQ(update_fire(kS3, kF3, 6, kExample).updated, 10);
    // Empty phases 3..5 follow the rounding formula (3 -> 6, 4 -> 7, 5 -> 9);
    // only occupied phases affect the successor.
    const std::vector<int> expected{2, 3, 6, 7, 9, 10, 1, 1, 1, 1};
    for (int phase = 1; phase <= 10; ++phase) EXPECT_EQ(tau(kS3, phase, kF3, kExample), expected[phase - 1]) << phase;
}

TEST(Population, FailureVectorProbability) {
    EXPECT_NEAR(pfailvec(kS3, kF3, 0.1), 0.059049, 1e-12);
    EXPECT_EQ(pfailvec(kS3, kF3, Rational(1, 10)), Rational(59049, 1000000));
}

TEST(Population, NonFiringStateShifts) {
    const GlobalState s{{0, 0, 2, 1, 0, 0, 5, 0, 0, 0}};
    const auto fvs = enumerate_failure_vectors(s, kExample);
    ASSERT_EQ(fvs.size(), 1u);
    EXPECT_EQ(fvs[0], FailureVector::all_star(10));
    EXPECT_EQ(successor(s, fvs[0], kExample), (GlobalState{{0, 0, 0, 2, 1, 0, 0, 5, 0, 0}}));
}

TEST(Population, RunningExampleFailureVectors) {
    const auto fvs = enumerate_failure_vectors(kS3, kExample);
    EXPECT_TRUE(std::find(fvs.begin(), fvs.end(), kF3) != fvs.end());
    double total = 0;
    for (const auto& f : fvs) {
        EXPECT_TRUE(f.has_star_prefix()) << f.to_string();
        total += pfailvec(kS3, f, 0.1);
    }
    EXPECT_NEAR(total, 1.0, 1e-12);
    std::set<FailureVector> distinct(fvs.begin(), fvs.end());
    EXPECT_EQ(distinct.size(), fvs.size());
}

TEST(Population, Pfail) {
    EXPECT_DOUBLE_EQ(pfail(5, 0, 0.1), 0.59049);
    EXPECT_EQ(pfail(3, 1, Rational(1, 2)), Rational(3, 8));
    EXPECT_EQ(pfail(0, 0, Rational(1, 3)), Rational(1));
    EXPECT_THROW(pfail(2, 3, 0.5), Error);
    EXPECT_THROW(pfail(2, -1, 0.5), Error);
}

TEST(Population, FailureVectorHelpers) {
    EXPECT_TRUE(kF3.has_star_prefix());
    EXPECT_FALSE((FailureVector{{0, S, 1}}).has_star_prefix());
    EXPECT_EQ(kF3.to_string(), "<*,*,*,*,*,*,1,0,0,0>");
    EXPECT_EQ(kS3.to_string(), "<0,0,0,0,0,2,1,0,0,5>");
    EXPECT_TRUE(kS3.is_firing());
    EXPECT_FALSE(kS3.is_synchronised());
    EXPECT_EQ(kS3.population(), 8);
}

TEST(Population, ShapeMismatchThrows) {
    EXPECT_THROW(successor(GlobalState{{1, 1}}, kF3, kExample), Error);
}

TEST(Population, StateCountMatchesFormula) {
    for (int N = 1; N <= 5; ++N) {
        for (int T = 1; T <= 6; ++T) {
            const auto m = build_population_dtmc(make(N, T, 0, 0.1, 0.1));
            EXPECT_EQ(m.chain.num_states(), 1 + binomial_u64(static_cast<unsigned>(N + T - 1), static_cast<unsigned>(N)));
        }
    }
    EXPECT_EQ(build_population_dtmc(make(3, 6, 1, 0.1, 0.1)).chain.num_states(), 57u);
}

TEST(Population, StatesAreLexicographic) {
    const auto states = enumerate_global_states(make(3, 4, 0, 0, 0));
    EXPECT_TRUE(std::is_sorted(states.begin(), states.end()));
    EXPECT_EQ(states.front(), (GlobalState{{0, 0, 0, 3}}));
    EXPECT_EQ(states.back(), (GlobalState{{3, 0, 0, 0}}));
}

TEST(Population, InitialRowIsMultinomial) {
    const auto p = make(3, 4, 1, 0.1, 0.2);
    const auto m = build_population_dtmc<Rational>(p);
    EXPECT_EQ(m.chain.row_sum(0), Rational(1));
    EXPECT_EQ(m.chain.probability(0, m.index_of(GlobalState{{1, 1, 1, 0}})), Rational(6, 64));
    EXPECT_EQ(m.chain.probability(0, m.index_of(GlobalState{{0, 0, 3, 0}})), Rational(1, 64));
    EXPECT_EQ(m.chain.probability(0, m.index_of(GlobalState{{2, 0, 0, 1}})), Rational(3, 64));
}

TEST(Population, RowsAreStochasticExactly) {
    const auto m = build_population_dtmc<Rational>(make(4, 6, 1, 0.2, 0.3));
    for (StateIndex s = 0; s < m.chain.num_states(); ++s) EXPECT_EQ(m.chain.row_sum(s), Rational(1)) << s;
}

TEST(Population, Labels) {
    const auto m = build_population_dtmc(make(2, 3, 0, 0.1, 0.1));
    const auto& synch = m.chain.label("synch");
    const auto& fire = m.chain.label("synch_fire");
    EXPECT_TRUE(m.chain.label("init")[0]);
    EXPECT_FALSE(synch[0]);
    EXPECT_TRUE(synch[m.index_of(GlobalState{{0, 2, 0}})]);
    EXPECT_FALSE(fire[m.index_of(GlobalState{{0, 2, 0}})]);
    EXPECT_TRUE(fire[m.index_of(GlobalState{{0, 0, 2}})]);
    EXPECT_FALSE(synch[m.index_of(GlobalState{{1, 0, 1}})]);
}

TEST(Population, SynchronisedStatesStaySynchronised) {
    const auto m = build_population_dtmc(make(3, 5, 1, 0.2, 0.4));
    const auto& synch = m.chain.label("synch");
    for (StateIndex s = 1; s < m.chain.num_states(); ++s) {
        if (!synch[s]) continue;
        for (const auto& e : m.chain.row(s)) EXPECT_TRUE(synch[e.target]) << m.state(s).to_string();
    }
}

TEST(Population, TotalFailureKeepsPhasesApart) {
    // With mu = 1 nobody perceives a firing, so configurations just rotate.
    const auto p = make(2, 4, 0, 0.5, 1.0);
    const GlobalState s{{1, 0, 0, 1}};
    const auto fvs = enumerate_failure_vectors(s, p);
    double mass = 0;
    for (const auto& f : fvs) {
        const double w = pfailvec(s, f, 1.0);
        if (w > 0) {
            EXPECT_EQ(successor(s, f, p), (GlobalState{{1, 1, 0, 0}}));
        }
        mass += w;
    }
    EXPECT_DOUBLE_EQ(mass, 1.0);
}

} // namespace
} // namespace pcosync

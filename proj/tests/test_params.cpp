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

#include "pcosync/params.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <limits>

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

std::string field_of(const ModelParams& p) {
    try {
        validate(p);
    } catch (const ParamError& e) {
        return e.field();
    }
    return "";
}

TEST(Params, AcceptsRunningExample) { EXPECT_NO_THROW(validate(make(8, 10, 2, 0.115, 0.1))); }

TEST(Params, RejectsOutOfRangeFields) {
    EXPECT_EQ(field_of(make(0, 10, 1, 0.1, 0.1)), "N");
    EXPECT_EQ(field_of(make(2, 0, 0, 0.1, 0.1)), "T");
    EXPECT_EQ(field_of(make(2, 5, -1, 0.1, 0.1)), "R");
    EXPECT_EQ(field_of(make(2, 5, 6, 0.1, 0.1)), "R");
    EXPECT_EQ(field_of(make(2, 5, 1, -0.1, 0.1)), "epsilon");
    EXPECT_EQ(field_of(make(2, 5, 1, std::numeric_limits<double>::infinity(), 0.1)), "epsilon");
    EXPECT_EQ(field_of(make(2, 5, 1, std::nan(""), 0.1)), "epsilon");
    EXPECT_EQ(field_of(make(2, 5, 1, 0.1, 1.5)), "mu");
    EXPECT_EQ(field_of(make(2, 5, 1, 0.1, -0.01)), "mu");
}

TEST(Params, MuMessage) {
    try {
        validate(make(2, 5, 1, 0.1, 1.5));
        FAIL() << "expected ParamError";
    } catch (const ParamError& e) {
        EXPECT_NE(std::string(e.what()).find("mu out of [0,1]"), std::string::npos);
    }
}

TEST(Params, BoundaryValuesAreValid) {
    EXPECT_NO_THROW(validate(make(1, 1, 0, 0, 0)));
    EXPECT_NO_THROW(validate(make(3, 4, 4, 0, 1)));
}

TEST(Params, LinearResponseRounds) {
    const auto prf = PhaseResponse::linear();
    EXPECT_EQ(pert(9, 5, 0.115, prf), 5); // 5.175
    EXPECT_EQ(pert(8, 5, 0.115, prf), 5); // 4.6
    EXPECT_EQ(pert(6, 5, 0.115, prf), 3); // 3.45
    EXPECT_EQ(pert(6, 6, 0.115, prf), 4); // 4.14
    EXPECT_EQ(pert(5, 1, 0.1, prf), 1);   // 0.5 rounds away from zero
    EXPECT_EQ(pert(7, 0, 0.3, prf), 0);
}

TEST(Params, RefractoryIgnoresPerturbation) {
    EXPECT_EQ(refr(1, 4, 2), 1);
    EXPECT_EQ(refr(2, 4, 2), 2);
    EXPECT_EQ(refr(3, 4, 2), 7);
    EXPECT_EQ(refr(3, 0, 0), 3);
}

TEST(Params, TableResponse) {
    auto p = make(2, 3, 0, 0, 0.5);
    p.prf = PhaseResponse::table({{0, 0, 1}, {0, 1, 1}, {0, 1, 2}});
    EXPECT_NO_THROW(validate(p));
    EXPECT_EQ(p.prf(3, 2, 0), 2);
    EXPECT_EQ(p.prf(1, 1, 0), 0);
    EXPECT_THROW(p.prf(4, 0, 0), ParamError);
    EXPECT_THROW(p.prf(1, 3, 0), ParamError);
}

TEST(Params, TableShapeAndMonotonicity) {
    auto p = make(2, 2, 0, 0, 0.5);
    p.prf = PhaseResponse::table({{0, 1, 1}});
    EXPECT_EQ(field_of(p), "prf");
    p.prf = PhaseResponse::table({{0, 1}, {0, 1, 1}});
    EXPECT_EQ(field_of(p), "prf");
    p.prf = PhaseResponse::table({{1, 1, 1}, {0, 1, 1}});
    EXPECT_EQ(field_of(p), "prf"); // nonzero at alpha = 0
    p.prf = PhaseResponse::table({{0, 2, 1}, {0, 1, 1}});
    EXPECT_EQ(field_of(p), "prf"); // decreasing
    p.prf = PhaseResponse::table({{0, -1, 1}, {0, 1, 1}});
    EXPECT_EQ(field_of(p), "prf");
}

TEST(Params, Equality) {
    EXPECT_EQ(make(2, 3, 1, 0.1, 0.2), make(2, 3, 1, 0.1, 0.2));
    EXPECT_NE(make(2, 3, 1, 0.1, 0.2), make(2, 3, 1, 0.1, 0.3));
}

} // namespace
} // namespace pcosync

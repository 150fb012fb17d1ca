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

#include "pcosync/io.hpp"

#include <gtest/gtest.h>

#include <filesystem>

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

std::string param_error(const std::string& json) {
    try {
        parse_params(json);
    } catch (const ParamError& e) {
        return e.what();
    }
    return "";
}

std::size_t count_lines(const std::string& text) { return static_cast<std::size_t>(std::count(text.begin(), text.end(), '\n')); }

TEST(Format, ShortestRoundTrip) {
    EXPECT_EQ(format_number(1.0), "1");
    EXPECT_EQ(format_number(0.1), "0.1");
    EXPECT_EQ(format_number(0.059049), "0.059049");
    EXPECT_EQ(format_number(1.0 / 3), "0.3333333333333333");
    EXPECT_EQ(format_number(kInfinity), "inf");
    for (double x : {1.0 / 3, 2.0 / 7, 1e-300, 0.1 + 0.2, 123456.789}) EXPECT_EQ(parse_number(format_number(x)), x);
    EXPECT_THROW(parse_number("1.5x"), Error);
}

TEST(Explicit, AbsorbingState) {
    DtmcBuilder<double> b;
    b.add(0, 1.0);
    b.finish_row();
    const auto d = std::move(b).build(0);
    const auto bundle = export_explicit(d, StateNames{"(x)", {"(0)"}});
    EXPECT_EQ(bundle.tra, "1 1\n0 0 1\n");
    EXPECT_EQ(bundle.sta, "(x)\n0:(0)\n");
    EXPECT_FALSE(bundle.srew);
}

TEST(Explicit, PopulationFiles) {
    const auto m = build_population_dtmc(make(2, 3, 0, 0.1, 0.1));
    const auto bundle = export_explicit(m);
    EXPECT_EQ(bundle.sta.substr(0, bundle.sta.find('\n')), "(k1,k2,k3)");
    EXPECT_NE(bundle.sta.find("\n0:(0,0,0)\n"), std::string::npos);
    EXPECT_EQ(bundle.lab.substr(0, bundle.lab.find('\n')), "0=\"init\" 1=\"synch\" 2=\"synch_fire\"");
    EXPECT_NE(bundle.lab.find("\n0: 0\n"), std::string::npos);
    EXPECT_EQ(count_lines(bundle.tra), m.chain.num_transitions() + 1);
}

TEST(Explicit, TransitionsSorted) {
    const auto m = build_population_dtmc(make(3, 5, 1, 0.2, 0.3));
    const auto lines = export_explicit(m).tra;
    std::istringstream in(lines);
    std::string header;
    std::getline(in, header);
    std::pair<std::size_t, std::size_t> last{0, 0};
    bool first = true;
    for (std::size_t s, t; in >> s >> t;) {
        std::string prob;
        in >> prob;
        if (!first) {
            EXPECT_LT(last, std::make_pair(s, t));
        }
        last = {s, t};
        first = false;
    }
}

TEST(Explicit, ReducedModelStateLines) {
    const auto reduced = build_reduced_dtmc(build_population_dtmc(make(3, 6, 1, 0.1, 0.1)));
    EXPECT_EQ(count_lines(export_explicit(reduced).sta), 22u + 1);
}

TEST(Explicit, ConcreteNames) {
    const auto m = build_concrete_dtmc(make(2, 3, 0, 0.1, 0.1));
    const auto bundle = export_explicit(m);
    EXPECT_EQ(bundle.sta.substr(0, bundle.sta.find('\n')), "(env,c,phase1,phase2,mode1,mode2)");
    EXPECT_EQ(count_lines(bundle.sta), m.chain.num_states() + 1);
    EXPECT_NE(bundle.lab.find("\"round_start\""), std::string::npos);
}

TEST(Explicit, RoundTripIsExact) {
    for (const auto& p : {make(3, 5, 1, 0.2, 0.3), make(2, 4, 0, 0.35, 0.1)}) {
        const auto m = build_population_dtmc(p);
        auto r = RewardStructure::zero(m.chain);
        for (std::size_t i = 0; i < r.state.size(); ++i) r.state[i] = 1.0 / static_cast<double>(i + 3);
        for (std::size_t i = 0; i < r.transition.size(); i += 2) r.transition[i] = 0.7 * static_cast<double>(i);
        const auto bundle = export_explicit(m, &r);
        const auto back = parse_explicit(bundle.tra, bundle.lab, bundle.srew, bundle.trew);
        EXPECT_TRUE(back.dtmc == m.chain);
        ASSERT_TRUE(back.rewards);
        EXPECT_EQ(back.rewards->state, r.state);
        EXPECT_EQ(back.rewards->transition, r.transition);
    }
    const auto c = build_concrete_dtmc(make(2, 3, 1, 0.3, 0.2));
    const auto bundle = export_explicit(c);
    EXPECT_TRUE(parse_explicit(bundle.tra, bundle.lab).dtmc == c.chain);
}

TEST(Explicit, Deterministic) {
    const auto a = export_explicit(build_population_dtmc(make(3, 4, 1, 0.2, 0.3)));
    const auto b = export_explicit(build_population_dtmc(make(3, 4, 1, 0.2, 0.3)));
    EXPECT_EQ(a.tra, b.tra);
    EXPECT_EQ(a.sta, b.sta);
    EXPECT_EQ(a.lab, b.lab);
}

TEST(Explicit, MalformedInput) {
    EXPECT_THROW(parse_explicit("", ""), Error);
    EXPECT_THROW(parse_explicit("2 1\n0 1\n", ""), Error);
    EXPECT_THROW(parse_explicit("2 2\n1 1 1\n0 1 1\n", ""), Error);
    EXPECT_THROW(parse_explicit("1 1\n0 0 1\n", "0=init\n"), Error);
}

TEST(Explicit, WritesFiles) {
    const auto dir = std::filesystem::temp_directory_path() / "pcosync_io_test";
    std::filesystem::create_directories(dir);
    const auto stem = (dir / "model").string();
    const auto bundle = export_explicit(build_population_dtmc(make(2, 3, 0, 0.1, 0.1)));
    bundle.write(stem);
    EXPECT_EQ(read_file(stem + ".tra"), bundle.tra);
    EXPECT_FALSE(std::filesystem::exists(stem + ".srew"));
    std::filesystem::remove_all(dir);
}

TEST(PrismLang, Population) {
    const auto out = export_prism_lang(make(2, 3, 0, 0.1, 0.1), ModelKind::Population);
    EXPECT_NE(out.text.find("dtmc"), std::string::npos);
    for (const char* var : {"k1 : [0..2]", "k2 : [0..2]", "k3 : [0..2]"}) EXPECT_NE(out.text.find(var), std::string::npos);
    EXPECT_NE(out.text.find("label \"sync_p\" = k1=2 | k2=2 | k3=2;"), std::string::npos);
    EXPECT_FALSE(out.warning);
    EXPECT_EQ(out.text, export_prism_lang(make(2, 3, 0, 0.1, 0.1), ModelKind::Population).text);
}

TEST(PrismLang, Concrete) {
    const auto out = export_prism_lang(make(3, 3, 0, 0.1, 0.1), ModelKind::Concrete);
    EXPECT_NE(out.text.find("phase3 : [1..3]"), std::string::npos);
    EXPECT_NE(out.text.find("label \"sync_c\" = started & phase1=phase2 & phase1=phase3;"), std::string::npos);
}

TEST(PrismLang, TableResponse) {
    auto p = make(2, 2, 0, 0, 0.5);
    p.prf = PhaseResponse::table({{0, 0, 1}, {0, 1, 1}});
    const auto out = export_prism_lang(p, ModelKind::Concrete);
    EXPECT_NE(out.text.find("prf = table"), std::string::npos);
    EXPECT_FALSE(out.warning);
}

TEST(PrismLang, CommandCountMatchesModel) {
    const auto p = make(2, 4, 1, 0.2, 0.3);
    const auto text = export_prism_lang(p, ModelKind::Population).text;
    std::size_t commands = 0;
    for (std::size_t pos = 0; (pos = text.find("    [] ", pos)) != std::string::npos; ++pos) ++commands;
    EXPECT_EQ(commands, build_population_dtmc(p).chain.num_states());
}

TEST(Params, LoadValid) {
    const auto p = parse_params(R"({"N":3,"T":6,"R":1,"epsilon":0.1,"mu":0.2,"prf":{"kind":"linear"}})");
    EXPECT_EQ(p, make(3, 6, 1, 0.1, 0.2));
    EXPECT_EQ(parse_params(params_to_json(p).dump()), p);
    // prf defaults to linear
    EXPECT_EQ(parse_params(R"({"N":3,"T":6,"R":1,"epsilon":0.1,"mu":0.2})"), p);
}

TEST(Params, LoadTable) {
    const auto p = parse_params(R"({"N":1,"T":2,"R":0,"epsilon":0,"mu":0,"prf":{"kind":"table","values":[[0,0],[0,1]]}})");
    EXPECT_EQ(p.prf.kind(), PhaseResponse::Kind::Table);
    EXPECT_EQ(parse_params(params_to_json(p).dump()), p);
}

TEST(Params, LoadErrors) {
    EXPECT_NE(param_error(R"({"N":3,"T":6,"R":1,"epsilon":0.1,"mu":1.5})").find("mu out of [0,1]"), std::string::npos);
    EXPECT_NE(param_error(R"({"N":3,"R":1,"epsilon":0.1,"mu":0.5})").find("\"T\""), std::string::npos);
    EXPECT_NE(param_error(R"({"N":3,"T":6,"R":1,"epsilon":0.1,"mu":0.5,"seed":3})").find("unknown key \"seed\""),
              std::string::npos);
    EXPECT_NE(param_error(R"({"N":3,"T":6,)").find("malformed JSON"), std::string::npos);
    EXPECT_NE(param_error(R"({"N":3.5,"T":6,"R":1,"epsilon":0.1,"mu":0.5})").find("integer"), std::string::npos);
    EXPECT_NE(param_error(R"({"N":2,"T":2,"R":0,"epsilon":0,"mu":0,"prf":{"kind":"cubic"}})").find("cubic"),
              std::string::npos);
    EXPECT_EQ(param_error(R"({"N":1,"T":2,"R":0,"epsilon":0,"mu":0,"prf":{"kind":"table","values":[[0,1],[0,1]]}})"),
              "");
    // nonzero alpha = 0 column, decreasing row, wrong shape
    EXPECT_NE(param_error(R"({"N":1,"T":2,"R":0,"epsilon":0,"mu":0,"prf":{"kind":"table","values":[[1,1],[0,1]]}})")
                  .find("alpha = 0"),
              std::string::npos);
    EXPECT_NE(param_error(R"({"N":2,"T":2,"R":0,"epsilon":0,"mu":0,"prf":{"kind":"table","values":[[0,2,1],[0,1,1]]}})")
                  .find("decreases"),
              std::string::npos);
    EXPECT_NE(param_error(R"({"N":1,"T":2,"R":0,"epsilon":0,"mu":0,"prf":{"kind":"table","values":[[0,1]]}})")
                  .find("rows"),
              std::string::npos);
    EXPECT_THROW(load_params("/nonexistent/params.json"), Error);
}

TEST(Rewards, FromJson) {
    const auto m = build_population_dtmc(make(1, 2, 0, 0, 0));
    // states: init, <0,1>, <1,0>
    const auto r = rewards_from_json(nlohmann::json::parse(R"({"state":[0,1,2],"transition":[[1,2,5]]})"), m.chain);
    EXPECT_EQ(r.state, (std::vector<double>{0, 1, 2}));
    EXPECT_DOUBLE_EQ(r.transition_reward(m.chain, 1, 2), 5.0);
    EXPECT_THROW(rewards_from_json(nlohmann::json::parse(R"({"state":[1]})"), m.chain), Error);
    EXPECT_THROW(rewards_from_json(nlohmann::json::parse(R"({"transition":[[1,1,5]]})"), m.chain), Error);
    EXPECT_THROW(rewards_from_json(nlohmann::json::parse(R"({"bonus":1})"), m.chain), Error);
}

TEST(Results, Csv) {
    EvalResult q;
    q.query = true;
    q.value = 0.25;
    q.iterations = 4;
    EvalResult b;
    b.holds = false;
    const auto csv = results_csv({{"P=? [ F \"synch\" ]", q}, {"P>0.5 [ F \"synch\" ]", b}});
    EXPECT_EQ(csv, "formula,value,residual,iterations\n"
                   "\"P=? [ F \"\"synch\"\" ]\",0.25,0,4\n"
                   "\"P>0.5 [ F \"\"synch\"\" ]\",false,0,0\n");
}

TEST(Results, ReportJson) {
    const auto p = make(2, 3, 0, 0.1, 0.1);
    const auto report = check_correspondence(build_concrete_dtmc(p), build_population_dtmc(p));
    const auto j = report_to_json(report);
    EXPECT_EQ(j.at("params"), params_to_json(p));
    EXPECT_EQ(j.at("entries").size(), report.entries.size());
    EXPECT_NE(report_table(report).find("max discrepancy"), std::string::npos);
}

} // namespace
} // namespace pcosync

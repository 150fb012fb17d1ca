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

// Serialization: explicit-format export and import, PRISM-language modules,
// parameter files, reward files and result reports.

#include "pcosync/abstraction.hpp"
#include "pcosync/check.hpp"
#include "pcosync/concrete.hpp"
#include "pcosync/population.hpp"
#include "pcosync/reduction.hpp"

#include <nlohmann/json.hpp>

#include <charconv>
#include <fstream>
#include <optional>
#include <sstream>
#include <system_error>

namespace pcosync {

/// Shortest decimal that parses back to the same double (at most 17
/// significant digits). Infinities print as "inf".
inline std::string format_number(double x) {
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[64];
    const auto r = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, r.ptr);
}

inline double parse_number(std::string_view text) {
    if (text == "inf") return kInfinity;
    if (text == "-inf") return -kInfinity;
    double x = 0;
    const auto r = std::from_chars(text.data(), text.data() + text.size(), x);
    if (r.ec != std::errc() || r.ptr != text.data() + text.size()) {
        throw Error("not a number: \"" + std::string(text) + "\"");
    }
    return x;
}

struct ExportBundle {
    std::string tra;
    std::string sta;
    std::string lab;
    std::optional<std::string> srew;
    std::optional<std::string> trew;

    /// Writes <stem>.tra, .sta, .lab and, when present, .srew and .trew.
    void write(const std::string& stem) const {
        auto put = [](const std::string& path, const std::string& text) {
            std::ofstream out(path, std::ios::binary);
            if (!out) throw Error("cannot write " + path);
            out << text;
        };
        put(stem + ".tra", tra);
        put(stem + ".sta", sta);
        put(stem + ".lab", lab);
        if (srew) put(stem + ".srew", *srew);
        if (trew) put(stem + ".trew", *trew);
    }
};

/// Header line and one name per state for the .sta file.
struct StateNames {
    std::string header;
    std::vector<std::string> names;
};

namespace detail {

inline std::string tuple(const std::vector<int>& xs) {
    std::string out = "(";
    for (std::size_t i = 0; i < xs.size(); ++i) out += (i ? "," : "") + std::to_string(xs[i]);
    return out + ")";
}

inline std::string tuple_header(const std::string& prefix, int n) {
    std::string out = "(";
    for (int i = 1; i <= n; ++i) out += (i > 1 ? "," : "") + prefix + std::to_string(i);
    return out + ")";
}

/// Label names in file order: "init" first, the rest alphabetically.
inline std::vector<std::string> label_order(const SparseDtmc<double>& d) {
    std::vector<std::string> names;
    if (d.has_label("init")) names.push_back("init");
    for (const auto& [name, set] : d.labels()) {
        if (name != "init") names.push_back(name);
    }
    return names;
}

} // namespace detail

/// Population-style names: counts per phase, with the unconfigured initial
/// state written as all zeros.
inline StateNames population_state_names(const std::vector<GlobalState>& states, int T) {
    StateNames out{detail::tuple_header("k", T), {}};
    out.names.reserve(states.size() + 1);
    out.names.push_back(detail::tuple(std::vector<int>(static_cast<std::size_t>(T), 0)));
    for (const auto& s : states) out.names.push_back(detail::tuple(s.counts));
    return out;
}

/// Concrete names: environment mode, counter, phases then oscillator modes.
template <class S>
StateNames concrete_state_names(const ConcreteDtmc<S>& c) {
    const int N = c.params.N;
    const std::string phases = detail::tuple_header("phase", N);
    const std::string modes = detail::tuple_header("mode", N);
    StateNames out{"(env,c," + phases.substr(1, phases.size() - 2) + "," + modes.substr(1), {}};
    out.names.reserve(c.chain.num_states());
    out.names.push_back(detail::tuple(std::vector<int>(static_cast<std::size_t>(2 * N + 2), 0)));
    for (StateIndex i = 1; i < c.chain.num_states(); ++i) {
        const auto s = c.state(i);
        std::vector<int> v{static_cast<int>(s.env_mode), s.counter};
        for (const auto& o : s.oscillators) v.push_back(o.phase);
        for (const auto& o : s.oscillators) v.push_back(static_cast<int>(o.mode));
        out.names.push_back(detail::tuple(v));
    }
    return out;
}

inline ExportBundle export_explicit(const SparseDtmc<double>& d, const StateNames& names,
                                    const RewardStructure* rewards = nullptr) {
    if (names.names.size() != d.num_states()) throw Error("state names do not match the model size");
    ExportBundle out;
    std::string tra = std::to_string(d.num_states()) + " " + std::to_string(d.num_transitions()) + "\n";
    for (StateIndex s = 0; s < d.num_states(); ++s) {
        for (const auto& e : d.row(s)) {
            tra += std::to_string(s) + " " + std::to_string(e.target) + " " + format_number(e.probability) + "\n";
        }
    }
    out.tra = std::move(tra);

    std::string sta = names.header + "\n";
    for (StateIndex s = 0; s < d.num_states(); ++s) sta += std::to_string(s) + ":" + names.names[s] + "\n";
    out.sta = std::move(sta);

    const auto order = detail::label_order(d);
    std::string lab;
    for (std::size_t i = 0; i < order.size(); ++i) {
        lab += (i ? " " : "") + std::to_string(i) + "=\"" + order[i] + "\"";
    }
    lab += "\n";
    for (StateIndex s = 0; s < d.num_states(); ++s) {
        std::string ids;
        for (std::size_t i = 0; i < order.size(); ++i) {
            if (d.label(order[i])[s]) ids += " " + std::to_string(i);
        }
        if (!ids.empty()) lab += std::to_string(s) + ":" + ids + "\n";
    }
    out.lab = std::move(lab);

    if (rewards) {
        rewards->check_aligned(d);
        std::string body;
        std::size_t count = 0;
        for (StateIndex s = 0; s < d.num_states(); ++s) {
            if (rewards->state[s] == 0) continue;
            body += std::to_string(s) + " " + format_number(rewards->state[s]) + "\n";
            ++count;
        }
        out.srew = std::to_string(d.num_states()) + " " + std::to_string(count) + "\n" + body;
        body.clear();
        count = 0;
        for (StateIndex s = 0; s < d.num_states(); ++s) {
            const auto row = d.row(s);
            for (std::size_t k = 0; k < row.size(); ++k) {
                const double r = rewards->transition[d.row_begin(s) + k];
                if (r == 0) continue;
                body += std::to_string(s) + " " + std::to_string(row[k].target) + " " + format_number(r) + "\n";
                ++count;
            }
        }
        out.trew = std::to_string(d.num_states()) + " " + std::to_string(count) + "\n" + body;
    }
    return out;
}

inline ExportBundle export_explicit(const PopulationDtmc<double>& m, const RewardStructure* rewards = nullptr) {
    return export_explicit(m.chain, population_state_names(m.states, m.params.T), rewards);
}

inline ExportBundle export_explicit(const ReducedDtmc<double>& m, const RewardStructure* rewards = nullptr) {
    return export_explicit(m.chain, population_state_names(m.states, m.params.T), rewards);
}

inline ExportBundle export_explicit(const ConcreteDtmc<double>& m, const RewardStructure* rewards = nullptr) {
    return export_explicit(m.chain, concrete_state_names(m), rewards);
}

struct ParsedExplicit {
    SparseDtmc<double> dtmc;
    std::optional<RewardStructure> rewards;
};

namespace detail {

inline std::vector<std::string> lines_of(const std::string& text) {
    std::vector<std::string> out;
    std::istringstream in(text);
    for (std::string line; std::getline(in, line);) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (!line.empty()) out.push_back(line);
    }
    return out;
}

inline std::vector<std::string> words_of(const std::string& line) {
    std::vector<std::string> out;
    std::istringstream in(line);
    for (std::string w; in >> w;) out.push_back(w);
    return out;
}

inline std::size_t parse_index(const std::string& text) {
    std::size_t x = 0;
    const auto r = std::from_chars(text.data(), text.data() + text.size(), x);
    if (r.ec != std::errc() || r.ptr != text.data() + text.size()) throw Error("not an index: \"" + text + "\"");
    return x;
}

inline std::pair<std::size_t, std::size_t> parse_header(const std::vector<std::string>& lines, const char* file) {
    if (lines.empty()) throw Error(std::string("empty ") + file + " file");
    const auto w = words_of(lines[0]);
    if (w.size() != 2) throw Error(std::string("malformed ") + file + " header: " + lines[0]);
    return {parse_index(w[0]), parse_index(w[1])};
}

} // namespace detail

/// Reads back what export_explicit writes. The initial state is the one
/// labelled "init" (state 0 when there is no such label).
inline ParsedExplicit parse_explicit(const std::string& tra, const std::string& lab,
                                     const std::optional<std::string>& srew = std::nullopt,
                                     const std::optional<std::string>& trew = std::nullopt) {
    const auto tl = detail::lines_of(tra);
    const auto [n, m] = detail::parse_header(tl, ".tra");
    if (tl.size() != m + 1) throw Error(".tra header promises " + std::to_string(m) + " transitions");

    DtmcBuilder<double> builder(n);
    StateIndex current = 0;
    for (std::size_t i = 1; i < tl.size(); ++i) {
        const auto w = detail::words_of(tl[i]);
        if (w.size() != 3) throw Error("malformed .tra line: " + tl[i]);
        const StateIndex s = detail::parse_index(w[0]);
        const StateIndex t = detail::parse_index(w[1]);
        if (s >= n || t >= n || s < current) throw Error(".tra line out of order or range: " + tl[i]);
        for (; current < s; ++current) builder.finish_row();
        builder.add(t, parse_number(w[2]));
    }
    for (; current < n; ++current) builder.finish_row();

    std::vector<std::string> names;
    std::vector<StateSet> sets;
    const auto ll = detail::lines_of(lab);
    if (!ll.empty()) {
        for (const auto& decl : detail::words_of(ll[0])) {
            const auto eq = decl.find('=');
            if (eq == std::string::npos || decl.size() < eq + 3 || decl[eq + 1] != '"' || decl.back() != '"') {
                throw Error("malformed label declaration: " + decl);
            }
            if (detail::parse_index(decl.substr(0, eq)) != names.size()) throw Error("label ids must be 0, 1, ...");
            names.push_back(decl.substr(eq + 2, decl.size() - eq - 3));
            sets.emplace_back(n, false);
        }
    }
    for (std::size_t i = 1; i < ll.size(); ++i) {
        const auto colon = ll[i].find(':');
        if (colon == std::string::npos) throw Error("malformed .lab line: " + ll[i]);
        const StateIndex s = detail::parse_index(ll[i].substr(0, colon));
        if (s >= n) throw Error(".lab state out of range: " + ll[i]);
        for (const auto& id : detail::words_of(ll[i].substr(colon + 1))) sets.at(detail::parse_index(id))[s] = true;
    }

    StateIndex initial = 0;
    for (std::size_t i = 0; i < names.size(); ++i) {
        if (names[i] != "init") continue;
        const auto it = std::find(sets[i].begin(), sets[i].end(), true);
        if (it != sets[i].end()) initial = static_cast<StateIndex>(it - sets[i].begin());
    }
    ParsedExplicit out{std::move(builder).build(initial), std::nullopt};
    for (std::size_t i = 0; i < names.size(); ++i) out.dtmc.set_label(names[i], std::move(sets[i]));

    if (srew || trew) {
        auto r = RewardStructure::zero(out.dtmc);
        if (srew) {
            const auto sl = detail::lines_of(*srew);
            detail::parse_header(sl, ".srew");
            for (std::size_t i = 1; i < sl.size(); ++i) {
                const auto w = detail::words_of(sl[i]);
                if (w.size() != 2) throw Error("malformed .srew line: " + sl[i]);
                r.state.at(detail::parse_index(w[0])) = parse_number(w[1]);
            }
        }
        if (trew) {
            const auto rl = detail::lines_of(*trew);
            detail::parse_header(rl, ".trew");
            for (std::size_t i = 1; i < rl.size(); ++i) {
                const auto w = detail::words_of(rl[i]);
                if (w.size() != 3) throw Error("malformed .trew line: " + rl[i]);
                const auto pos = out.dtmc.find(detail::parse_index(w[0]), detail::parse_index(w[1]));
                if (pos == SparseDtmc<double>::npos) throw Error(".trew names a missing transition: " + rl[i]);
                r.transition[pos] = parse_number(w[2]);
            }
        }
        out.rewards = std::move(r);
    }
    return out;
}

// ---------------------------------------------------------------------------
// PRISM language

enum class ModelKind { Population, Concrete };

inline ModelKind parse_model_kind(const std::string& text) {
    if (text == "population") return ModelKind::Population;
    if (text == "concrete") return ModelKind::Concrete;
    throw Error("unknown model kind \"" + text + "\" (expected population or concrete)");
}

struct PrismModel {
    std::string text;
    std::optional<std::string> warning;
};

namespace detail {

inline std::string assignment(const std::vector<std::string>& vars, const std::vector<int>& values) {
    std::string out;
    for (std::size_t i = 0; i < vars.size(); ++i) {
        out += (i ? "&(" : "(") + vars[i] + "'=" + std::to_string(values[i]) + ")";
    }
    return out;
}

inline std::string guard(const std::vector<std::string>& vars, const std::vector<int>& values) {
    std::string out;
    for (std::size_t i = 0; i < vars.size(); ++i) {
        out += (i ? " & " : "") + vars[i] + "=" + std::to_string(values[i]);
    }
    return out;
}

/// One command per state: `[] started & <guard> -> p1:(...) + p2:(...);`.
/// The unconfigured initial state (index 0) is encoded by started = false.
inline std::string state_commands(const SparseDtmc<double>& d, const std::vector<std::string>& vars,
                                  const std::function<std::vector<int>(StateIndex)>& values) {
    std::string out;
    for (StateIndex s = 0; s < d.num_states(); ++s) {
        const auto row = d.row(s);
        if (row.empty()) continue;
        out += s == 0 ? "    [] !started -> " : "    [] started & " + guard(vars, values(s)) + " -> ";
        for (std::size_t k = 0; k < row.size(); ++k) {
            out += (k ? " + " : "") + format_number(row[k].probability) + ":";
            if (s == 0) out += "(started'=true)&";
            out += assignment(vars, values(row[k].target));
        }
        out += ";\n";
    }
    return out;
}

} // namespace detail

/// A PRISM DTMC module with one guarded command per reachable state, plus
/// the synchronisation label. Any phase response table can be written this
/// way, so there is never a need to fall back to explicit export.
inline PrismModel export_prism_lang(const ModelParams& p, ModelKind kind,
                                    std::size_t budget = kDefaultStateBudget) {
    validate(p);
    std::ostringstream out;
    out << "// N = " << p.N << ", T = " << p.T << ", R = " << p.R << ", epsilon = " << format_number(p.epsilon)
        << ", mu = " << format_number(p.mu) << ", prf = "
        << (p.prf.kind() == PhaseResponse::Kind::Linear ? "linear" : "table") << "\n";
    out << "dtmc\n\n";
    if (kind == ModelKind::Population) {
        const auto m = build_population_dtmc<double>(p);
        std::vector<std::string> vars;
        for (int i = 1; i <= p.T; ++i) vars.push_back("k" + std::to_string(i));
        out << "module population\n";
        out << "    started : bool init false;\n";
        for (const auto& v : vars) out << "    " << v << " : [0.." << p.N << "] init 0;\n";
        out << "\n"
            << detail::state_commands(m.chain, vars, [&](StateIndex s) {
                   return s == 0 ? std::vector<int>(static_cast<std::size_t>(p.T), 0) : m.state(s).counts;
               });
        out << "endmodule\n\n";
        out << "label \"sync_p\" = ";
        for (int i = 0; i < p.T; ++i) out << (i ? " | " : "") << vars[static_cast<std::size_t>(i)] << "=" << p.N;
        out << ";\n";
    } else {
        check_concrete_scale(p, budget);
        const auto m = build_concrete_dtmc<double>(p, budget);
        std::vector<std::string> vars{"env", "c"};
        for (int i = 1; i <= p.N; ++i) vars.push_back("phase" + std::to_string(i));
        for (int i = 1; i <= p.N; ++i) vars.push_back("mode" + std::to_string(i));
        out << "module concrete\n";
        out << "    started : bool init false;\n";
        out << "    env : [0..1] init 0;\n";
        out << "    c : [0.." << p.N << "] init 0;\n";
        for (int i = 1; i <= p.N; ++i) out << "    phase" << i << " : [1.." << p.T << "] init 1;\n";
        for (int i = 1; i <= p.N; ++i) out << "    mode" << i << " : [0..1] init 0;\n";
        out << "\n"
            << detail::state_commands(m.chain, vars, [&](StateIndex s) {
                   std::vector<int> v{0, 0};
                   if (s == 0) {
                       v.insert(v.end(), static_cast<std::size_t>(p.N), 1);
                       v.insert(v.end(), static_cast<std::size_t>(p.N), 0);
                       return v;
                   }
                   const auto st = m.state(s);
                   v = {static_cast<int>(st.env_mode), st.counter};
                   for (const auto& o : st.oscillators) v.push_back(o.phase);
                   for (const auto& o : st.oscillators) v.push_back(static_cast<int>(o.mode));
                   return v;
               });
        out << "endmodule\n\n";
        out << "label \"sync_c\" = started";
        for (int i = 2; i <= p.N; ++i) out << " & phase1=phase" << i;
        out << ";\n";
    }
    return {out.str(), std::nullopt};
}

// ---------------------------------------------------------------------------
// Parameter files

inline nlohmann::json params_to_json(const ModelParams& p) {
    nlohmann::json j{{"N", p.N}, {"T", p.T}, {"R", p.R}, {"epsilon", p.epsilon}, {"mu", p.mu}};
    if (p.prf.kind() == PhaseResponse::Kind::Linear) {
        j["prf"] = nlohmann::json{{"kind", "linear"}};
    } else {
        j["prf"] = nlohmann::json{{"kind", "table"}, {"values", p.prf.values()}};
    }
    return j;
}

inline ModelParams params_from_json(const nlohmann::json& j) {
    if (!j.is_object()) throw ParamError("params", "parameter file must hold a JSON object");
    static const std::vector<std::string> known{"N", "T", "R", "epsilon", "mu", "prf"};
    for (const auto& [key, value] : j.items()) {
        if (std::find(known.begin(), known.end(), key) == known.end()) {
            throw ParamError(key, "unknown key \"" + key + "\"");
        }
    }
    auto field = [&](const std::string& key) -> const nlohmann::json& {
        if (!j.contains(key)) throw ParamError(key, "missing field \"" + key + "\"");
        return j.at(key);
    };
    auto integer = [&](const std::string& key) {
        const auto& v = field(key);
        if (!v.is_number_integer()) throw ParamError(key, "field \"" + key + "\" must be an integer");
        return v.get<int>();
    };
    auto real = [&](const std::string& key) {
        const auto& v = field(key);
        if (!v.is_number()) throw ParamError(key, "field \"" + key + "\" must be a number");
        return v.get<double>();
    };

    ModelParams p;
    p.N = integer("N");
    p.T = integer("T");
    p.R = integer("R");
    p.epsilon = real("epsilon");
    p.mu = real("mu");
    if (j.contains("prf")) {
        const auto& prf = j.at("prf");
        if (!prf.is_object() || !prf.contains("kind") || !prf.at("kind").is_string()) {
            throw ParamError("prf", "prf must be an object with a \"kind\"");
        }
        for (const auto& [key, value] : prf.items()) {
            if (key != "kind" && key != "values") throw ParamError("prf", "unknown key \"" + key + "\" in prf");
        }
        const auto kind = prf.at("kind").get<std::string>();
        if (kind == "linear") {
            p.prf = PhaseResponse::linear();
        } else if (kind == "table") {
            if (!prf.contains("values")) throw ParamError("prf", "missing field \"values\"");
            try {
                p.prf = PhaseResponse::table(prf.at("values").get<std::vector<std::vector<int>>>());
            } catch (const nlohmann::json::exception&) {
                throw ParamError("prf", "prf values must be a table of integers");
            }
        } else {
            throw ParamError("prf", "unknown prf kind \"" + kind + "\"");
        }
    }
    validate(p);
    return p;
}

inline ModelParams parse_params(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParamError("params", std::string("malformed JSON: ") + e.what());
    }
    return params_from_json(j);
}

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot read " + path);
    std::ostringstream text;
    text << in.rdbuf();
    return text.str();
}

inline ModelParams load_params(const std::string& path) { return parse_params(read_file(path)); }

// ---------------------------------------------------------------------------
// Reward files: {"state": [r0, r1, ...], "transition": [[src, dst, r], ...]}.
// Both members are optional; missing entries are zero.

inline RewardStructure rewards_from_json(const nlohmann::json& j, const SparseDtmc<double>& d) {
    if (!j.is_object()) throw Error("reward file must hold a JSON object");
    auto r = RewardStructure::zero(d);
    for (const auto& [key, value] : j.items()) {
        if (key != "state" && key != "transition") throw Error("unknown key \"" + key + "\" in reward file");
    }
    try {
        if (j.contains("state")) {
            const auto v = j.at("state").get<std::vector<double>>();
            if (v.size() != d.num_states()) {
                throw Error("reward file has " + std::to_string(v.size()) + " state rewards for " +
                            std::to_string(d.num_states()) + " states");
            }
            r.state = v;
        }
        if (j.contains("transition")) {
            for (const auto& entry : j.at("transition")) {
                const auto src = entry.at(0).get<StateIndex>();
                const auto dst = entry.at(1).get<StateIndex>();
                const auto pos = d.find(src, dst);
                if (pos == SparseDtmc<double>::npos) {
                    throw Error("reward file names a missing transition " + std::to_string(src) + " -> " +
                                std::to_string(dst));
                }
                r.transition[pos] = entry.at(2).get<double>();
            }
        }
    } catch (const nlohmann::json::exception& e) {
        throw Error(std::string("malformed reward file: ") + e.what());
    }
    return r;
}

// ---------------------------------------------------------------------------
// Results

inline std::string csv_quote(const std::string& s) {
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

inline std::string results_csv(const std::vector<std::pair<std::string, EvalResult>>& results) {
    std::string out = "formula,value,residual,iterations\n";
    for (const auto& [formula, r] : results) {
        out += csv_quote(formula) + "," + (r.query ? format_number(r.value) : (r.holds ? "true" : "false")) + "," +
               format_number(r.residual) + "," + std::to_string(r.iterations) + "\n";
    }
    return out;
}

inline nlohmann::json report_to_json(const AbstractionReport& r) {
    nlohmann::json entries = nlohmann::json::array();
    for (const auto& e : r.entries) {
        entries.push_back({{"concrete_source", e.concrete_source},
                           {"source", e.source.counts},
                           {"target", e.target.counts},
                           {"population", e.population},
                           {"concrete", e.concrete}});
    }
    return {{"params", params_to_json(r.params)},
            {"sources_checked", r.sources_checked},
            {"max_discrepancy", r.max_discrepancy},
            {"sync_concrete", r.sync_concrete},
            {"sync_population", r.sync_population},
            {"entries", std::move(entries)}};
}

inline std::string report_table(const AbstractionReport& r) {
    std::ostringstream out;
    out << "N=" << r.params.N << " T=" << r.params.T << " R=" << r.params.R << " epsilon=" << format_number(r.params.epsilon)
        << " mu=" << format_number(r.params.mu) << "\n";
    out << "sources checked   " << r.sources_checked << "\n";
    out << "transitions       " << r.entries.size() << "\n";
    out << "max discrepancy   " << format_number(r.max_discrepancy) << "\n";
    out << "sync (concrete)   " << format_number(r.sync_concrete) << "\n";
    out << "sync (population) " << format_number(r.sync_population) << "\n";
    return out.str();
}

} // namespace pcosync

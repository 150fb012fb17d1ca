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

// Command-line driver: build, check, compare, table, simulate and export.

#include "pcosync/abstraction.hpp"
#include "pcosync/check.hpp"
#include "pcosync/io.hpp"
#include "pcosync/reduction.hpp"
#include "pcosync/simulate.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <iomanip>
#include <ostream>

namespace pcosync::cli {

enum ExitCode : int { kOk = 0, kFailed = 1, kUsage = 2, kBudget = 3 };

/// Discrepancy above which `compare` reports failure.
inline constexpr double kCompareTolerance = 1e-10;

struct RunConfig {
    std::string params_path;
    std::string kind = "population";
    bool reduce = false;
    std::vector<std::string> props;
    std::string prop_file;
    std::string rewards;
    std::string out;
    bool exact = false;
    std::uint64_t seed = 1;
    std::size_t budget = kDefaultStateBudget;
    std::size_t paths = 100000;
    std::size_t horizon = 0;
    std::string label = "synch";
    std::string format = "explicit";
    std::vector<std::string> rows;
};

/// Property files hold one formula per line; '#' starts a comment.
inline std::vector<std::string> parse_property_file(const std::string& text) {
    std::vector<std::string> out;
    std::istringstream in(text);
    for (std::string line; std::getline(in, line);) {
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        const auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos) continue;
        const auto last = line.find_last_not_of(" \t\r");
        out.push_back(line.substr(first, last - first + 1));
    }
    return out;
}

/// A model ready for analysis, with the optional reward structure aligned to it.
struct Model {
    ModelParams params;
    SparseDtmc<double> chain;
    StateNames names;
    std::optional<RewardStructure> rewards;
};

namespace detail {

inline RewardStructure load_rewards(const RunConfig& cfg, const SparseDtmc<double>& d) {
    if (cfg.rewards == "steps") {
        auto r = RewardStructure::zero(d);
        std::fill(r.state.begin(), r.state.end(), 1.0);
        return r;
    }
    try {
        return rewards_from_json(nlohmann::json::parse(read_file(cfg.rewards)), d);
    } catch (const nlohmann::json::parse_error& e) {
        throw Error("malformed reward file " + cfg.rewards + ": " + e.what());
    }
}

template <class S>
Model build(const RunConfig& cfg, const ModelParams& p) {
    Model m;
    m.params = p;
    const auto kind = parse_model_kind(cfg.kind);
    if (kind == ModelKind::Concrete) {
        if (cfg.reduce) throw ParamError("reduce", "--reduce applies to population models only");
        check_concrete_scale(p, cfg.budget);
        const auto c = build_concrete_dtmc<S>(p, cfg.budget);
        m.chain = c.chain.template convert<double>();
        m.names = concrete_state_names(c);
        if (!cfg.rewards.empty()) m.rewards = load_rewards(cfg, m.chain);
        return m;
    }
    const auto full = build_population_dtmc<S>(p);
    std::optional<RewardStructure> full_rewards;
    if (!cfg.rewards.empty()) full_rewards = load_rewards(cfg, full.chain.template convert<double>());
    if (!cfg.reduce) {
        m.chain = full.chain.template convert<double>();
        m.names = population_state_names(full.states, p.T);
        m.rewards = std::move(full_rewards);
        return m;
    }
    const auto reduced = build_reduced_dtmc(full);
    m.chain = reduced.chain.template convert<double>();
    m.names = population_state_names(reduced.states, p.T);
    if (full_rewards) m.rewards = transform_rewards(full, reduced, *full_rewards);
    return m;
}

inline Model build(const RunConfig& cfg) {
    const auto p = load_params(cfg.params_path);
    return cfg.exact ? build<Rational>(cfg, p) : build<double>(cfg, p);
}

inline void emit(const RunConfig& cfg, std::ostream& out, const std::string& text) {
    if (cfg.out.empty()) {
        out << text;
        return;
    }
    std::ofstream file(cfg.out, std::ios::binary);
    if (!file) throw Error("cannot write " + cfg.out);
    file << text;
}

inline int cmd_build(const RunConfig& cfg, std::ostream& out) {
    const auto m = build(cfg);
    out << "N=" << m.params.N << " T=" << m.params.T << " kind=" << cfg.kind << (cfg.reduce ? " reduced" : "")
        << " states=" << m.chain.num_states() << " transitions=" << m.chain.num_transitions() << "\n";
    return kOk;
}

inline int cmd_check(const RunConfig& cfg, std::ostream& out) {
    auto props = cfg.props;
    if (!cfg.prop_file.empty()) {
        const auto more = parse_property_file(read_file(cfg.prop_file));
        props.insert(props.end(), more.begin(), more.end());
    }
    if (props.empty()) throw ParamError("prop", "no properties given (use --prop or --prop-file)");
    std::vector<FormulaPtr> formulas;
    for (const auto& text : props) formulas.push_back(parse_pctl(text));

    const auto m = build(cfg);
    PctlChecker checker(m.chain, m.rewards ? &*m.rewards : nullptr);
    std::vector<std::pair<std::string, EvalResult>> results;
    bool all_hold = true;
    for (std::size_t i = 0; i < formulas.size(); ++i) {
        auto r = checker.evaluate(*formulas[i]);
        if (!r.query && !r.holds) all_hold = false;
        results.emplace_back(props[i], std::move(r));
    }
    emit(cfg, out, results_csv(results));
    return all_hold ? kOk : kFailed;
}

template <class S>
AbstractionReport compare(const RunConfig& cfg, const ModelParams& p) {
    check_concrete_scale(p, cfg.budget);
    return check_correspondence(build_concrete_dtmc<S>(p, cfg.budget), build_population_dtmc<S>(p));
}

inline int cmd_compare(const RunConfig& cfg, std::ostream& out) {
    const auto p = load_params(cfg.params_path);
    const auto report = cfg.exact ? compare<Rational>(cfg, p) : compare<double>(cfg, p);
    out << report_table(report);
    if (!cfg.out.empty()) {
        std::ofstream file(cfg.out, std::ios::binary);
        if (!file) throw Error("cannot write " + cfg.out);
        file << report_to_json(report).dump(2) << "\n";
    }
    const bool ok = report.max_discrepancy <= kCompareTolerance && report.sync_discrepancy() <= kCompareTolerance;
    out << (ok ? "result            agree\n" : "result            DISAGREE\n");
    return ok ? kOk : kFailed;
}

/// One row of the reduction table.
struct TableRow {
    int N, T;
    std::size_t states, reduced_states, transitions, reduced_transitions;
    std::size_t formula_states, formula_reduced;
    std::size_t transition_bound; ///< |P| - 2 C(N+T-2, N)
    bool bound_holds;
};

inline TableRow table_row(const ModelParams& p) {
    const auto full = build_population_dtmc<double>(p);
    const auto reduced = build_reduced_dtmc(full);
    TableRow r{};
    r.N = p.N;
    r.T = p.T;
    r.states = full.chain.num_states();
    r.reduced_states = reduced.chain.num_states();
    r.transitions = full.chain.num_transitions();
    r.reduced_transitions = reduced.chain.num_transitions();
    const auto N = static_cast<unsigned>(p.N);
    const auto T = static_cast<unsigned>(p.T);
    r.formula_states = 1 + binomial_u64(N + T - 1, N);
    r.formula_reduced = 1 + rising_factorial(T, N - 1) / rising_factorial(1, N - 1);
    const std::size_t cut = 2 * binomial_u64(N + T - 2, N);
    r.transition_bound = r.transitions >= cut ? r.transitions - cut : 0;
    r.bound_holds = r.transitions >= cut && r.reduced_transitions <= r.transition_bound;
    return r;
}

inline std::vector<std::pair<int, int>> parse_rows(const std::vector<std::string>& rows) {
    std::vector<std::pair<int, int>> out;
    for (const auto& row : rows) {
        int n = 0, t = 0;
        char sep = 0;
        std::istringstream in(row);
        if (!(in >> n >> sep >> t) || sep != 'x' || !in.eof()) {
            throw ParamError("rows", "row \"" + row + "\" is not of the form NxT");
        }
        out.emplace_back(n, t);
    }
    return out;
}

inline const std::vector<std::pair<int, int>>& default_rows() {
    static const std::vector<std::pair<int, int>> rows{{3, 6}, {5, 6}, {8, 6}, {3, 8}, {5, 8},
                                                       {8, 8}, {3, 10}, {5, 10}, {8, 10}};
    return rows;
}

inline int cmd_table(const RunConfig& cfg, std::ostream& out) {
    ModelParams base;
    base.R = 1;
    base.epsilon = 0.1;
    base.mu = 0.1;
    if (!cfg.params_path.empty()) base = load_params(cfg.params_path);
    const auto rows = cfg.rows.empty() ? default_rows() : parse_rows(cfg.rows);

    std::ostringstream text;
    text << "# R=" << base.R << " epsilon=" << format_number(base.epsilon) << " mu=" << format_number(base.mu)
         << " prf=" << (base.prf.kind() == PhaseResponse::Kind::Linear ? "linear" : "table") << "\n";
    text << std::setw(3) << "N" << std::setw(4) << "T" << std::setw(9) << "states" << std::setw(9) << "reduced"
         << std::setw(8) << "red%" << std::setw(13) << "transitions" << std::setw(10) << "reduced" << std::setw(8)
         << "red%" << std::setw(10) << "bound" << "\n";
    bool all_ok = true;
    for (const auto& [n, t] : rows) {
        ModelParams p = base;
        p.N = n;
        p.T = t;
        if (p.prf.kind() == PhaseResponse::Kind::Table && (n != base.N || t != base.T)) {
            throw ParamError("prf", "a phase response table fixes N and T; use a linear prf for table rows");
        }
        p.R = std::min(p.R, p.T);
        const auto r = table_row(p);
        const bool counts_ok = r.states == r.formula_states && r.reduced_states == r.formula_reduced;
        all_ok = all_ok && counts_ok && r.bound_holds;
        char state_pct[32], trans_pct[32];
        std::snprintf(state_pct, sizeof state_pct, "%.2f",
                      100.0 * (1.0 - static_cast<double>(r.reduced_states) / static_cast<double>(r.formula_states)));
        std::snprintf(trans_pct, sizeof trans_pct, "%.2f",
                      100.0 * (1.0 - static_cast<double>(r.reduced_transitions) / static_cast<double>(r.transitions)));
        text << std::setw(3) << r.N << std::setw(4) << r.T << std::setw(9) << r.states << std::setw(9)
             << r.reduced_states << std::setw(8) << state_pct << std::setw(13) << r.transitions << std::setw(10)
             << r.reduced_transitions << std::setw(8) << trans_pct << std::setw(10)
             << (r.bound_holds ? "pass" : "FAIL") << (counts_ok ? "" : "  (state count differs from formula)")
             << "\n";
    }
    text << "# states: 1 + C(N+T-1, N); reduced: 1 + T^(N-1)/(N-1)! (rising factorial)\n"
         << "# bound: reduced transitions <= transitions - 2 C(N+T-2, N)\n"
         << "# The published unreduced state counts equal 2 C(N+T-1, N) + 1, which suggests an encoding\n"
         << "# with one extra bit per global state; this table reports the formula count instead.\n";
    emit(cfg, out, text.str());
    return all_ok ? kOk : kFailed;
}

inline int cmd_simulate(const RunConfig& cfg, std::ostream& out) {
    const auto m = build(cfg);
    const std::size_t horizon =
        cfg.horizon ? cfg.horizon : static_cast<std::size_t>(10 * m.params.T * m.params.N);
    const auto& target = m.chain.label(cfg.label);
    const auto est = mc_estimate(m.chain, target, cfg.paths, horizon, cfg.seed);
    const double exact = prob_bounded_until(m.chain, all_states(m.chain), target, horizon)[m.chain.initial()];
    out << "label=" << cfg.label << " horizon=" << horizon << " paths=" << est.paths << " hits=" << est.hits
        << " estimate=" << format_number(est.estimate) << " half_width=" << format_number(est.half_width)
        << " exact=" << format_number(exact) << "\n";
    return kOk;
}

inline int cmd_export(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    if (cfg.out.empty()) throw ParamError("out", "export needs --out");
    if (cfg.format == "prism") {
        if (cfg.reduce) throw ParamError("reduce", "--reduce is not supported for PRISM-language export");
        const auto model = export_prism_lang(load_params(cfg.params_path), parse_model_kind(cfg.kind), cfg.budget);
        if (model.warning) err << "warning: " << *model.warning << "\n";
        emit(cfg, out, model.text);
        return kOk;
    }
    const auto m = build(cfg);
    const auto bundle = export_explicit(m.chain, m.names, m.rewards ? &*m.rewards : nullptr);
    bundle.write(cfg.out);
    out << "wrote " << cfg.out << ".{tra,sta,lab" << (bundle.srew ? ",srew,trew" : "") << "} states=" << m.chain.num_states()
        << " transitions=" << m.chain.num_transitions() << "\n";
    return kOk;
}

} // namespace detail

/// Runs one invocation and returns its exit code.
inline int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Pulse-coupled oscillator synchronisation models"};
    app.require_subcommand(1, 1);
    RunConfig cfg;

    auto params = [&](CLI::App* sub, bool required) {
        auto* opt = sub->add_option("--params", cfg.params_path, "JSON parameter file");
        if (required) opt->required();
    };
    auto model = [&](CLI::App* sub) {
        sub->add_option("--kind", cfg.kind, "population or concrete")
            ->check(CLI::IsMember({"population", "concrete"}));
        sub->add_flag("--reduce", cfg.reduce, "use the reduced population model");
        sub->add_flag("--exact", cfg.exact, "build with exact rational probabilities");
        sub->add_option("--budget", cfg.budget, "state budget for concrete models");
    };

    auto* build = app.add_subcommand("build", "build a model and print its size");
    params(build, true);
    model(build);

    auto* check = app.add_subcommand("check", "evaluate PCTL properties, CSV output");
    params(check, true);
    model(check);
    check->add_option("--prop", cfg.props, "PCTL property (repeatable)");
    check->add_option("--prop-file", cfg.prop_file, "file with one property per line");
    check->add_option("--rewards", cfg.rewards, "\"steps\" or a JSON reward file");
    check->add_option("--out", cfg.out, "CSV output path");

    auto* compare = app.add_subcommand("compare", "compare the concrete and population models");
    params(compare, true);
    compare->add_flag("--exact", cfg.exact, "compare with exact rational probabilities");
    compare->add_option("--budget", cfg.budget, "state budget for the concrete model");
    compare->add_option("--out", cfg.out, "JSON report path");

    auto* table = app.add_subcommand("table", "reduction table");
    params(table, false);
    table->add_option("--rows", cfg.rows, "rows as NxT (default: the nine standard configurations)")->delimiter(',');
    table->add_option("--out", cfg.out, "output path");

    auto* simulate = app.add_subcommand("simulate", "Monte Carlo estimate of bounded reachability");
    params(simulate, true);
    model(simulate);
    simulate->add_option("--label", cfg.label, "target label");
    simulate->add_option("--paths", cfg.paths, "number of sampled paths");
    simulate->add_option("--horizon", cfg.horizon, "path length (default 10 T N)");
    simulate->add_option("--seed", cfg.seed, "random seed");

    auto* exp = app.add_subcommand("export", "write the model in PRISM explicit or language format");
    params(exp, true);
    model(exp);
    exp->add_option("--format", cfg.format, "explicit or prism")->check(CLI::IsMember({"explicit", "prism"}));
    exp->add_option("--rewards", cfg.rewards, "\"steps\" or a JSON reward file");
    exp->add_option("--out", cfg.out, "output file (prism) or file stem (explicit)")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e, out, err) == 0 ? kOk : kUsage;
    }

    try {
        if (build->parsed()) return detail::cmd_build(cfg, out);
        if (check->parsed()) return detail::cmd_check(cfg, out);
        if (compare->parsed()) return detail::cmd_compare(cfg, out);
        if (table->parsed()) return detail::cmd_table(cfg, out);
        if (simulate->parsed()) return detail::cmd_simulate(cfg, out);
        return detail::cmd_export(cfg, out, err);
    } catch (const BudgetExceeded& e) {
        err << "error: " << e.what() << "\n";
        return kBudget;
    } catch (const ParamError& e) {
        err << "error: " << e.what() << "\n";
        return kUsage;
    } catch (const ParseError& e) {
        err << "error: " << e.what() << "\n";
        return kUsage;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kFailed;
    }
}

} // namespace pcosync::cli

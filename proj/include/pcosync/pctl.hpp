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

// PCTL with the reachability-reward operator, in PRISM-like concrete syntax:
//
//   state  := implies
//   implies:= or [ "=>" implies ]
//   or     := and { "|" and }
//   and    := unary { "&" unary }
//   unary  := "!" unary | "true" | "false" | "\"label\"" | "(" state ")"
//           | "P" bound "[" path "]" | "R" bound "[" "F" state "]"
//   bound  := ("<" | "<=" | ">=" | ">") number | "=?"
//   path   := "X" state | "F" [ "<=" int ] state | state "U" [ "<=" int ] state

#include "pcosync/error.hpp"

#include <cctype>
#include <charconv>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace pcosync {

enum class Comparison { Less, LessEqual, GreaterEqual, Greater };

inline bool compare(double value, Comparison op, double threshold) {
    switch (op) {
    case Comparison::Less: return value < threshold;
    case Comparison::LessEqual: return value <= threshold;
    case Comparison::GreaterEqual: return value >= threshold;
    case Comparison::Greater: return value > threshold;
    }
    return false;
}

inline const char* to_string(Comparison op) {
    switch (op) {
    case Comparison::Less: return "<";
    case Comparison::LessEqual: return "<=";
    case Comparison::GreaterEqual: return ">=";
    case Comparison::Greater: return ">";
    }
    return "?";
}

/// Threshold of a P or R operator; absent for "=?" queries.
struct Bound {
    Comparison op;
    double value;
};

struct PctlFormula;
using FormulaPtr = std::shared_ptr<const PctlFormula>;

struct PathFormula {
    enum class Kind { Next, Until };
    Kind kind = Kind::Until;
    FormulaPtr left;                  ///< Until only
    FormulaPtr right;
    std::optional<std::size_t> steps; ///< step bound; nullopt means unbounded
};

struct PctlFormula {
    enum class Kind { True, False, Atom, Not, And, Or, Implies, Prob, Reward };
    Kind kind = Kind::True;
    std::string label;          ///< Atom
    FormulaPtr lhs, rhs;        ///< Not uses lhs; Reward target in lhs
    std::optional<Bound> bound; ///< Prob/Reward; nullopt is a query
    PathFormula path;           ///< Prob

    bool is_query() const { return (kind == Kind::Prob || kind == Kind::Reward) && !bound; }
};

inline PctlFormula formula_of(PctlFormula::Kind kind) {
    PctlFormula f;
    f.kind = kind;
    return f;
}

inline FormulaPtr make_formula(PctlFormula f) { return std::make_shared<const PctlFormula>(std::move(f)); }

inline FormulaPtr make_true() { return make_formula(formula_of(PctlFormula::Kind::True)); }

inline FormulaPtr make_atom(std::string label) {
    PctlFormula f = formula_of(PctlFormula::Kind::Atom);
    f.label = std::move(label);
    return make_formula(std::move(f));
}

inline FormulaPtr make_not(FormulaPtr x) {
    PctlFormula f = formula_of(PctlFormula::Kind::Not);
    f.lhs = std::move(x);
    return make_formula(std::move(f));
}

inline FormulaPtr make_binary(PctlFormula::Kind kind, FormulaPtr a, FormulaPtr b) {
    PctlFormula f = formula_of(kind);
    f.lhs = std::move(a);
    f.rhs = std::move(b);
    return make_formula(std::move(f));
}

inline std::string to_string(const PctlFormula& f);

inline std::string to_string(const PathFormula& p) {
    const std::string bound = p.steps ? "<=" + std::to_string(*p.steps) : "";
    if (p.kind == PathFormula::Kind::Next) return "X " + to_string(*p.right);
    if (p.left->kind == PctlFormula::Kind::True) return "F" + bound + " " + to_string(*p.right);
    return to_string(*p.left) + " U" + bound + " " + to_string(*p.right);
}

inline std::string to_string(const PctlFormula& f) {
    auto bound = [&](const char* op) {
        return std::string(op) + (f.bound ? std::string(to_string(f.bound->op)) + std::to_string(f.bound->value) : "=?");
    };
    switch (f.kind) {
    case PctlFormula::Kind::True: return "true";
    case PctlFormula::Kind::False: return "false";
    case PctlFormula::Kind::Atom: return "\"" + f.label + "\"";
    case PctlFormula::Kind::Not: return "!" + to_string(*f.lhs);
    case PctlFormula::Kind::And: return "(" + to_string(*f.lhs) + " & " + to_string(*f.rhs) + ")";
    case PctlFormula::Kind::Or: return "(" + to_string(*f.lhs) + " | " + to_string(*f.rhs) + ")";
    case PctlFormula::Kind::Implies: return "(" + to_string(*f.lhs) + " => " + to_string(*f.rhs) + ")";
    case PctlFormula::Kind::Prob: return bound("P") + " [ " + to_string(f.path) + " ]";
    case PctlFormula::Kind::Reward: return bound("R") + " [ F " + to_string(*f.lhs) + " ]";
    }
    return "";
}

namespace detail {

class PctlParser {
public:
    explicit PctlParser(std::string_view text) : text_(text) {}

    FormulaPtr parse() {
        auto f = state();
        skip_space();
        if (pos_ != text_.size()) fail("unexpected input '" + std::string(1, text_[pos_]) + "'");
        return f;
    }

private:
    [[noreturn]] void fail(const std::string& what) const { throw ParseError(pos_, what); }

    void skip_space() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    }

    bool accept(std::string_view token) {
        skip_space();
        if (text_.substr(pos_, token.size()) != token) return false;
        // keywords must not run into an identifier
        if (std::isalpha(static_cast<unsigned char>(token.back())) && pos_ + token.size() < text_.size() &&
            std::isalnum(static_cast<unsigned char>(text_[pos_ + token.size()]))) {
            return false;
        }
        pos_ += token.size();
        return true;
    }

    void expect(std::string_view token) {
        if (!accept(token)) {
            if (pos_ >= text_.size()) fail("expected '" + std::string(token) + "' but reached end of input");
            fail("expected '" + std::string(token) + "'");
        }
    }

    double number() {
        skip_space();
        double value = 0;
        const char* begin = text_.data() + pos_;
        const char* end = text_.data() + text_.size();
        auto [ptr, ec] = std::from_chars(begin, end, value);
        if (ec != std::errc() || ptr == begin) fail("expected a number");
        pos_ += static_cast<std::size_t>(ptr - begin);
        return value;
    }

    std::size_t integer() {
        skip_space();
        std::size_t value = 0;
        const char* begin = text_.data() + pos_;
        auto [ptr, ec] = std::from_chars(begin, text_.data() + text_.size(), value);
        if (ec != std::errc() || ptr == begin) fail("expected a step bound");
        pos_ += static_cast<std::size_t>(ptr - begin);
        return value;
    }

    std::optional<Bound> bound(bool probability) {
        if (accept("=?")) return std::nullopt;
        Comparison op;
        if (accept("<=")) {
            op = Comparison::LessEqual;
        } else if (accept(">=")) {
            op = Comparison::GreaterEqual;
        } else if (accept("<")) {
            op = Comparison::Less;
        } else if (accept(">")) {
            op = Comparison::Greater;
        } else {
            fail("expected a comparison or '=?'");
        }
        const std::size_t at = pos_;
        const double value = number();
        if (probability && !(value >= 0 && value <= 1)) throw ParseError(at, "probability bound outside [0,1]");
        return Bound{op, value};
    }

    std::optional<std::size_t> step_bound() {
        if (accept("<=")) return integer();
        return std::nullopt;
    }

    FormulaPtr state() {
        auto left = disjunction();
        if (accept("=>")) return make_binary(PctlFormula::Kind::Implies, left, state());
        return left;
    }

    FormulaPtr disjunction() {
        auto left = conjunction();
        while (accept("|")) left = make_binary(PctlFormula::Kind::Or, left, conjunction());
        return left;
    }

    FormulaPtr conjunction() {
        auto left = unary();
        while (accept("&")) left = make_binary(PctlFormula::Kind::And, left, unary());
        return left;
    }

    FormulaPtr unary() {
        skip_space();
        if (pos_ >= text_.size()) fail("unexpected end of input");
        if (accept("!")) return make_not(unary());
        if (accept("true")) return make_true();
        if (accept("false")) return make_formula(formula_of(PctlFormula::Kind::False));
        if (accept("(")) {
            auto inner = state();
            expect(")");
            return inner;
        }
        if (accept("\"")) {
            const std::size_t close = text_.find('"', pos_);
            if (close == std::string_view::npos) fail("unterminated label");
            std::string label(text_.substr(pos_, close - pos_));
            if (label.empty()) fail("empty label");
            pos_ = close + 1;
            return make_atom(std::move(label));
        }
        if (accept("P")) {
            PctlFormula f = formula_of(PctlFormula::Kind::Prob);
            f.bound = bound(true);
            expect("[");
            f.path = path();
            expect("]");
            return make_formula(std::move(f));
        }
        if (accept("R")) {
            PctlFormula f = formula_of(PctlFormula::Kind::Reward);
            f.bound = bound(false);
            expect("[");
            expect("F");
            f.lhs = state();
            expect("]");
            return make_formula(std::move(f));
        }
        fail("unexpected input '" + std::string(1, text_[pos_]) + "'");
    }

    PathFormula path() {
        PathFormula p;
        if (accept("X")) {
            p.kind = PathFormula::Kind::Next;
            p.right = state();
            return p;
        }
        if (accept("F")) {
            p.left = make_true();
            p.steps = step_bound();
            p.right = state();
            return p;
        }
        p.left = state();
        expect("U");
        p.steps = step_bound();
        p.right = state();
        return p;
    }

    std::string_view text_;
    std::size_t pos_ = 0;
};

} // namespace detail

inline FormulaPtr parse_pctl(std::string_view text) { return detail::PctlParser(text).parse(); }

} // namespace pcosync

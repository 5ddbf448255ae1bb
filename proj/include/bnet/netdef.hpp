#pragma once

// Text formats: the `.bnet` network definition, DOT graph export, JSON results and the
// tab-separated sample table.
//
// .bnet grammar (one statement per line; brackets may span lines):
//
//   # comment to end of line
//   var <name> : <state> <state> ... [@trait | @question]
//   cpt <child> [| <parent> [, <parent>]*] = [ <row> ; <row> ; ... ]
//   prior <name> = [ <row> ]
//
// States are bare words or double-quoted strings (escapes \" and \\). Each row is a
// whitespace-separated list of nonnegative decimals, one row per parent configuration with
// the last listed parent varying fastest. Rows are normalized, so percentages paste in
// directly. Every variable must be declared before a table refers to it.

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "json.hpp"

#include "bnet/error.hpp"
#include "bnet/factor.hpp"
#include "bnet/inference.hpp"
#include "bnet/model.hpp"
#include "bnet/scoring.hpp"
#include "bnet/simulate.hpp"

namespace bnet {

namespace detail {

inline bool is_bare_char(char c) {
    switch (c) {
        case ' ': case '\t': case '\r': case '\n': case '\v': case '\f':
        case '#': case '"': case '|': case ',': case '=': case '[': case ']': case ';': case ':': case '@':
        case '\\':
            return false;
        default:
            return true;
    }
}

enum class TokenKind { word, string, punct, newline, end };

struct Token {
    TokenKind kind = TokenKind::end;
    std::string text;
    std::size_t line = 1;
    std::size_t column = 1;
};

class Lexer {
public:
    explicit Lexer(std::string_view text) : text_(text) {
        std::size_t start = 0;
        for (std::size_t i = 0; i <= text_.size(); ++i) {
            if (i == text_.size() || text_[i] == '\n') {
                auto line = text_.substr(start, i - start);
                if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
                lines_.push_back(line);
                start = i + 1;
            }
        }
    }

    std::string snippet(std::size_t line) const {
        return line >= 1 && line <= lines_.size() ? std::string(lines_[line - 1]) : std::string();
    }

    [[noreturn]] void fail(std::size_t line, std::size_t column, const std::string& message) const {
        throw ParseError(line, column, message, snippet(line));
    }

    [[noreturn]] void fail(const Token& at, const std::string& message) const { fail(at.line, at.column, message); }

    Token next() {
        while (pos_ < text_.size()) {
            char c = text_[pos_];
            if (c == ' ' || c == '\t' || c == '\r' || c == '\v' || c == '\f') {
                advance();
            } else if (c == '#') {
                while (pos_ < text_.size() && text_[pos_] != '\n') advance();
            } else {
                break;
            }
        }
        Token tok;
        tok.line = line_;
        tok.column = column_;
        if (pos_ >= text_.size()) return tok;

        char c = text_[pos_];
        if (c == '\n') {
            advance();
            tok.kind = TokenKind::newline;
            return tok;
        }
        if (c == '"') {
            advance();
            tok.kind = TokenKind::string;
            while (true) {
                if (pos_ >= text_.size() || text_[pos_] == '\n') fail(tok, "unterminated string");
                char d = text_[pos_];
                if (d == '"') {
                    advance();
                    break;
                }
                if (d == '\\') {
                    advance();
                    if (pos_ >= text_.size() || (text_[pos_] != '"' && text_[pos_] != '\\'))
                        fail(line_, column_, "unknown escape in string");
                    d = text_[pos_];
                }
                tok.text.push_back(d);
                advance();
            }
            return tok;
        }
        if (is_bare_char(c)) {
            tok.kind = TokenKind::word;
            while (pos_ < text_.size() && is_bare_char(text_[pos_])) {
                tok.text.push_back(text_[pos_]);
                advance();
            }
            return tok;
        }
        if (c == '\\') fail(tok, "unexpected character '\\'");
        tok.kind = TokenKind::punct;
        tok.text = std::string(1, c);
        advance();
        return tok;
    }

private:
    void advance() {
        if (text_[pos_] == '\n') {
            ++line_;
            column_ = 1;
        } else {
            ++column_;
        }
        ++pos_;
    }

    std::string_view text_;
    std::vector<std::string_view> lines_;
    std::size_t pos_ = 0;
    std::size_t line_ = 1;
    std::size_t column_ = 1;
};

class Parser {
public:
    explicit Parser(std::string_view text) : lex_(text) { tok_ = lex_.next(); }

    Network parse() {
        while (tok_.kind != TokenKind::end) {
            if (tok_.kind == TokenKind::newline) {
                shift();
                continue;
            }
            if (tok_.kind != TokenKind::word) lex_.fail(tok_, "unknown token '" + tok_.text + "'");
            if (tok_.text == "var") {
                parse_var();
            } else if (tok_.text == "cpt") {
                parse_table(false);
            } else if (tok_.text == "prior") {
                parse_table(true);
            } else {
                lex_.fail(tok_, "unknown token '" + tok_.text + "', expected var, cpt or prior");
            }
        }
        if (vars_.empty()) lex_.fail(1, 1, "no variables declared");
        for (const auto& v : vars_)
            if (!table_at_.count(v.name)) {
                const auto& at = var_at_.at(v.name);
                lex_.fail(at, "variable '" + v.name + "' has no table");
            }
        try {
            return build_network(vars_, cpts_);
        } catch (const CycleError& e) {
            const auto& at = table_at_.at(e.cycle().front());
            lex_.fail(at, e.what());
        } catch (const ModelError& e) {
            lex_.fail(last_, e.what());
        }
    }

private:
    void shift() { tok_ = lex_.next(); }

    bool at_punct(char c) const { return tok_.kind == TokenKind::punct && tok_.text[0] == c; }

    void expect_punct(char c) {
        if (!at_punct(c)) lex_.fail(tok_, std::string("expected '") + c + "'" + found());
        shift();
    }

    void expect_end_of_statement() {
        if (tok_.kind != TokenKind::newline && tok_.kind != TokenKind::end)
            lex_.fail(tok_, "expected end of line" + found());
    }

    std::string found() const {
        switch (tok_.kind) {
            case TokenKind::end: return ", found end of input";
            case TokenKind::newline: return ", found end of line";
            default: return ", found '" + tok_.text + "'";
        }
    }

    Token expect_name(const char* what) {
        if (tok_.kind != TokenKind::word) lex_.fail(tok_, std::string("expected ") + what + found());
        if (!is_valid_identifier(tok_.text)) lex_.fail(tok_, "invalid " + std::string(what) + " '" + tok_.text + "'");
        Token name = tok_;
        shift();
        return name;
    }

    Token expect_declared(const char* what) {
        Token name = expect_name(what);
        if (!var_at_.count(name.text)) lex_.fail(name, "undeclared variable '" + name.text + "'");
        return name;
    }

    void parse_var() {
        last_ = tok_;
        shift();
        Token name = expect_name("variable name");
        if (var_at_.count(name.text)) lex_.fail(name, "duplicate declaration of variable '" + name.text + "'");
        expect_punct(':');

        Variable var{name.text, {}, Role::unspecified};
        while (tok_.kind == TokenKind::word || tok_.kind == TokenKind::string) {
            if (tok_.text.empty()) lex_.fail(tok_, "empty state label");
            for (const auto& s : var.states)
                if (s == tok_.text) lex_.fail(tok_, "duplicate state '" + tok_.text + "'");
            var.states.push_back(tok_.text);
            shift();
        }
        if (at_punct('@')) {
            shift();
            if (tok_.kind == TokenKind::word && tok_.text == "trait") {
                var.role = Role::trait;
            } else if (tok_.kind == TokenKind::word && tok_.text == "question") {
                var.role = Role::question;
            } else {
                lex_.fail(tok_, "unknown role" + found() + ", expected trait or question");
            }
            shift();
        }
        expect_end_of_statement();
        if (var.states.size() < 2) lex_.fail(name, "variable '" + name.text + "' needs at least 2 states");
        var_at_.emplace(name.text, name);
        vars_.push_back(std::move(var));
    }

    void parse_table(bool prior) {
        last_ = tok_;
        shift();
        Token child = expect_declared("variable name");
        if (table_at_.count(child.text)) lex_.fail(child, "duplicate table for variable '" + child.text + "'");

        Cpt cpt{child.text, {}, {}};
        std::size_t configs = 1;
        if (at_punct('|')) {
            if (prior) lex_.fail(tok_, "a prior cannot have parents");
            do {
                shift();
                Token parent = expect_declared("parent name");
                for (const auto& p : cpt.parents)
                    if (p == parent.text) lex_.fail(parent, "parent '" + parent.text + "' listed twice");
                cpt.parents.push_back(parent.text);
                configs *= cardinality(parent.text);
            } while (at_punct(','));
        }
        expect_punct('=');
        if (!at_punct('[')) lex_.fail(tok_, "expected '['" + found());
        shift();

        const std::size_t width = cardinality(child.text);
        std::vector<double> row;
        Token row_start;
        bool closed = false;
        auto finish_row = [&](bool allow_empty) {
            if (row.empty() && allow_empty) return;
            if (row.empty()) lex_.fail(tok_, "empty row");
            if (row.size() != width)
                lex_.fail(row_start, "row " + std::to_string(cpt.rows.size() + 1) + " has " +
                                         std::to_string(row.size()) + " entries, expected " + std::to_string(width));
            double sum = 0.0;
            for (double x : row) sum += x;
            if (sum == 0.0) lex_.fail(row_start, "row " + std::to_string(cpt.rows.size() + 1) + " is all zeros");
            cpt.rows.push_back(std::move(row));
            row.clear();
        };
        while (!closed) {
            switch (tok_.kind) {
                case TokenKind::newline:
                    shift();
                    break;
                case TokenKind::end:
                    lex_.fail(tok_, "unterminated table, expected ']'");
                case TokenKind::word: {
                    if (row.empty()) row_start = tok_;
                    row.push_back(number(tok_));
                    shift();
                    break;
                }
                case TokenKind::string:
                    lex_.fail(tok_, "expected a number, found a quoted string");
                case TokenKind::punct:
                    if (at_punct(';')) {
                        finish_row(false);
                        shift();
                    } else if (at_punct(']')) {
                        finish_row(!cpt.rows.empty());
                        if (cpt.rows.size() != configs)
                            lex_.fail(tok_, "table for '" + child.text + "' has " + std::to_string(cpt.rows.size()) +
                                                " rows, expected " + std::to_string(configs));
                        shift();
                        closed = true;
                    } else {
                        lex_.fail(tok_, "unexpected '" + tok_.text + "' in table");
                    }
                    break;
            }
            if (!closed && cpt.rows.size() > configs)
                lex_.fail(row_start, "table for '" + child.text + "' has more than " + std::to_string(configs) +
                                         " rows");
        }
        expect_end_of_statement();
        table_at_.emplace(child.text, child);
        cpts_.push_back(std::move(cpt));
    }

    double number(const Token& t) const {
        std::string_view text = t.text;
        if (!text.empty() && text.front() == '+') text.remove_prefix(1);
        double value = 0.0;
        auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
        if (ec != std::errc() || ptr != text.data() + text.size() || !std::isfinite(value))
            lex_.fail(t, "invalid number '" + t.text + "'");
        if (value < 0.0) lex_.fail(t, "negative probability '" + t.text + "'");
        return value;
    }

    std::size_t cardinality(const std::string& name) const {
        for (const auto& v : vars_)
            if (v.name == name) return v.states.size();
        return 0;
    }

    Lexer lex_;
    Token tok_;
    Token last_;
    std::vector<Variable> vars_;
    std::vector<Cpt> cpts_;
    std::map<std::string, Token> var_at_;
    std::map<std::string, Token> table_at_;
};

inline std::string format_number(double x) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, ptr);
}

inline std::string quote_if_needed(std::string_view label) {
    bool bare = !label.empty();
    for (char c : label) bare = bare && is_bare_char(c);
    if (bare) return std::string(label);
    std::string out = "\"";
    for (char c : label) {
        if (c == '"' || c == '\\') out.push_back('\\');
        out.push_back(c);
    }
    out.push_back('"');
    return out;
}

inline std::string dot_id(std::string_view name) {
    std::string out = "\"";
    for (char c : name) {
        if (c == '"' || c == '\\') out.push_back('\\');
        out.push_back(c);
    }
    out.push_back('"');
    return out;
}

}  // namespace detail

/// Parses `.bnet` text; every failure is a ParseError carrying line and column.
inline Network parse_network(std::string_view text) { return detail::Parser(text).parse(); }

/// Canonical `.bnet` text: variables then tables, both in topological order, numbers in
/// shortest round-trip form. parse_network(serialize_network(n)) == n.
inline std::string serialize_network(const Network& network) {
    std::string out;
    for (const auto& name : network.topological_order()) {
        const auto& v = network.variable(name);
        out += "var " + v.name + " :";
        for (const auto& s : v.states) out += " " + detail::quote_if_needed(s);
        if (v.role != Role::unspecified) out += " @" + std::string(to_string(v.role));
        out += "\n";
    }
    for (const auto& name : network.topological_order()) {
        const auto& cpt = network.cpt(name);
        out += "\n";
        if (cpt.parents.empty()) {
            out += "prior " + cpt.child + " = [";
        } else {
            out += "cpt " + cpt.child + " |";
            for (std::size_t i = 0; i < cpt.parents.size(); ++i) out += (i ? ", " : " ") + cpt.parents[i];
            out += " = [";
        }
        auto row_text = [](const std::vector<double>& row) {
            std::string s;
            for (double x : row) s += " " + detail::format_number(x);
            return s;
        };
        if (cpt.rows.size() == 1) {
            out += row_text(cpt.rows[0]) + " ]\n";
        } else {
            out += "\n";
            for (std::size_t r = 0; r < cpt.rows.size(); ++r)
                out += " " + row_text(cpt.rows[r]) + (r + 1 < cpt.rows.size() ? " ;\n" : "\n");
            out += "]\n";
        }
    }
    return out;
}

/// DOT digraph: traits as ellipses, questions as boxes, other variables as diamonds.
inline std::string export_dot(const Network& network) {
    const auto& topo = network.topological_order();
    std::map<std::string, std::size_t> rank;
    for (std::size_t i = 0; i < topo.size(); ++i) rank[topo[i]] = i;

    std::string out = "digraph network {\n";
    for (const auto& name : topo) {
        const auto& v = network.variable(name);
        std::string_view shape = v.role == Role::trait ? "ellipse" : v.role == Role::question ? "box" : "diamond";
        out += "  " + detail::dot_id(name) + " [label=" + detail::dot_id(name) + ", shape=" + std::string(shape) + "];\n";
    }
    std::vector<std::pair<std::size_t, std::size_t>> edges;
    for (const auto& cpt : network.cpts())
        for (const auto& p : cpt.parents) edges.emplace_back(rank[p], rank[cpt.child]);
    std::sort(edges.begin(), edges.end());
    for (const auto& [from, to] : edges)
        out += "  " + detail::dot_id(topo[from]) + " -> " + detail::dot_id(topo[to]) + ";\n";
    out += "}\n";
    return out;
}

/// {"evidence_probability": p, "marginals": {var: {state: p, ...}, ...}}; variables sorted
/// by name, states in declaration order, numbers at full round-trip precision.
inline std::string export_result_json(const QueryResult& result) {
    nlohmann::ordered_json doc;
    doc["evidence_probability"] = result.evidence_probability;
    auto& marginals = doc["marginals"] = nlohmann::ordered_json::object();
    for (const auto& [var, m] : result.marginals) {
        auto& entry = marginals[var] = nlohmann::ordered_json::object();
        for (std::size_t i = 0; i < m.states.size(); ++i) entry[m.states[i]] = m.probabilities[i];
    }
    return doc.dump(2) + "\n";
}

inline std::string export_score_json(const TraitScore& score, double evidence_probability) {
    nlohmann::ordered_json doc;
    doc["variable"] = score.variable;
    doc["evidence_probability"] = evidence_probability;
    auto& post = doc["posterior"] = nlohmann::ordered_json::object();
    for (std::size_t i = 0; i < score.posterior.states.size(); ++i)
        post[score.posterior.states[i]] = score.posterior.probabilities[i];
    doc["map_state"] = score.map_state;
    doc["expected_level"] = score.expected_level ? nlohmann::ordered_json(*score.expected_level) : nullptr;
    auto& th = doc["thresholds"] = nlohmann::ordered_json::array();
    for (const auto& t : score.thresholds)
        th.push_back({{"comparator", std::string(to_string(t.threshold.comparator))},
                      {"level", t.threshold.level},
                      {"probability", t.probability}});
    return doc.dump(2) + "\n";
}

/// {"variables": [...], "table": [{"states": [...], "probability": p}, ...]} in factor order.
inline std::string export_joint_json(const Factor& joint, const Network& network) {
    nlohmann::ordered_json doc;
    doc["variables"] = joint.names();
    auto& table = doc["table"] = nlohmann::ordered_json::array();
    std::vector<std::size_t> counter(joint.scope().size(), 0);
    for (std::size_t k = 0; k < joint.size(); ++k) {
        std::vector<std::string> states;
        for (std::size_t i = 0; i < counter.size(); ++i)
            states.push_back(network.variable(joint.scope()[i].name).states[counter[i]]);
        table.push_back({{"states", states}, {"probability", joint.values()[k]}});
        for (std::size_t i = counter.size(); i-- > 0;) {
            if (++counter[i] < joint.scope()[i].cardinality) break;
            counter[i] = 0;
        }
    }
    return doc.dump(2) + "\n";
}

/// Tab-separated: a header of column names plus "weight", then one line per sample.
inline std::string serialize_samples(const SampleSet& samples) {
    std::ostringstream out;
    for (const auto& c : samples.columns) out << c << '\t';
    out << "weight\n";
    for (std::size_t r = 0; r < samples.size(); ++r) {
        for (std::size_t c = 0; c < samples.columns.size(); ++c) out << detail::quote_if_needed(samples.label(r, c)) << '\t';
        out << detail::format_number(samples.weights[r]) << '\n';
    }
    return out.str();
}

}  // namespace bnet

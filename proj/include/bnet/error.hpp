#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace bnet {

/// Raised when a network, evidence set or query argument is malformed.
class ModelError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// The parent relation contains a directed cycle; `cycle()` lists its vertices in edge order.
class CycleError : public ModelError {
public:
    explicit CycleError(std::vector<std::string> cycle)
        : ModelError(describe(cycle)), cycle_(std::move(cycle)) {}

    const std::vector<std::string>& cycle() const noexcept { return cycle_; }

private:
    static std::string describe(const std::vector<std::string>& cycle) {
        std::string msg = "cycle detected:";
        for (const auto& v : cycle) msg += " " + v + " ->";
        if (!cycle.empty()) msg += " " + cycle.front();
        return msg;
    }

    std::vector<std::string> cycle_;
};

/// Evidence (or a factor) carries zero probability mass under the model.
class ImpossibleEvidence : public std::runtime_error {
public:
    ImpossibleEvidence() : std::runtime_error("impossible evidence: total probability mass is zero") {}
    using std::runtime_error::runtime_error;
};

class ParseError : public std::runtime_error {
public:
    ParseError(std::size_t line, std::size_t column, std::string message, std::string snippet)
        : std::runtime_error(format(line, column, message, snippet)),
          line_(line),
          column_(column),
          message_(std::move(message)),
          snippet_(std::move(snippet)) {}

    std::size_t line() const noexcept { return line_; }
    std::size_t column() const noexcept { return column_; }
    const std::string& message() const noexcept { return message_; }
    const std::string& snippet() const noexcept { return snippet_; }

private:
    static std::string format(std::size_t line, std::size_t column, const std::string& message,
                              const std::string& snippet) {
        std::string out = std::to_string(line) + ":" + std::to_string(column) + ": " + message;
        if (!snippet.empty()) out += "\n  " + snippet;
        return out;
    }

    std::size_t line_;
    std::size_t column_;
    std::string message_;
    std::string snippet_;
};

}  // namespace bnet

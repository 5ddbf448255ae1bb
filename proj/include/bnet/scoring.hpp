#pragma once

#include <charconv>
#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "bnet/error.hpp"
#include "bnet/inference.hpp"
#include "bnet/model.hpp"

namespace bnet {

enum class Comparator { ge, gt, le, lt, eq };

inline std::string_view to_string(Comparator c) {
    switch (c) {
        case Comparator::ge: return ">=";
        case Comparator::gt: return ">";
        case Comparator::le: return "<=";
        case Comparator::lt: return "<";
        case Comparator::eq: return "==";
    }
    return "?";
}

struct Threshold {
    Comparator comparator = Comparator::ge;
    double level = 0.0;

    bool admits(double value) const {
        switch (comparator) {
            case Comparator::ge: return value >= level;
            case Comparator::gt: return value > level;
            case Comparator::le: return value <= level;
            case Comparator::lt: return value < level;
            case Comparator::eq: return value == level;
        }
        return false;
    }
};

struct ThresholdProbability {
    Threshold threshold;
    double probability = 0.0;
};

struct TraitScore {
    std::string variable;
    Marginal posterior;
    std::string map_state;
    /// Posterior mean of the numeric state labels; absent when any label is non-numeric.
    std::optional<double> expected_level;
    std::vector<ThresholdProbability> thresholds;
};

/// Parses a whole string as a finite decimal number.
inline std::optional<double> parse_number(std::string_view text) {
    if (!text.empty() && text.front() == '+') text.remove_prefix(1);
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc() || ptr != text.data() + text.size() || !std::isfinite(value)) return std::nullopt;
    return value;
}

/// Accepts ">=3", ">3", "<=2", "<2", "==1" or "=1" (surrounding spaces allowed).
inline Threshold parse_threshold(std::string_view text) {
    auto trim = [](std::string_view s) {
        while (!s.empty() && s.front() == ' ') s.remove_prefix(1);
        while (!s.empty() && s.back() == ' ') s.remove_suffix(1);
        return s;
    };
    text = trim(text);
    static constexpr std::pair<std::string_view, Comparator> kOps[] = {
        {">=", Comparator::ge}, {"<=", Comparator::le}, {"==", Comparator::eq},
        {">", Comparator::gt},  {"<", Comparator::lt},  {"=", Comparator::eq},
    };
    for (const auto& [op, cmp] : kOps) {
        if (text.substr(0, op.size()) == op) {
            if (auto level = parse_number(trim(text.substr(op.size())))) return {cmp, *level};
            break;
        }
    }
    throw ModelError("malformed threshold '" + std::string(text) + "'");
}

/// Scores an already computed posterior. MAP ties go to the lowest state index.
inline TraitScore score_posterior(std::string variable, Marginal posterior,
                                  const std::vector<Threshold>& thresholds = {}) {
    TraitScore score;
    score.variable = std::move(variable);

    std::size_t best = 0;
    for (std::size_t i = 1; i < posterior.probabilities.size(); ++i)
        if (posterior.probabilities[i] > posterior.probabilities[best]) best = i;
    score.map_state = posterior.states.at(best);

    std::vector<double> numeric;
    for (const auto& s : posterior.states) {
        auto v = parse_number(s);
        if (!v) break;
        numeric.push_back(*v);
    }
    const bool all_numeric = numeric.size() == posterior.states.size();
    if (all_numeric) {
        long double mean = 0.0L;
        for (std::size_t i = 0; i < numeric.size(); ++i)
            mean += static_cast<long double>(numeric[i]) * posterior.probabilities[i];
        score.expected_level = static_cast<double>(mean);
    }
    if (!thresholds.empty() && !all_numeric)
        throw ModelError("thresholds need numeric state labels, '" + score.variable + "' has none");
    for (const auto& t : thresholds) {
        long double p = 0.0L;
        for (std::size_t i = 0; i < numeric.size(); ++i)
            if (t.admits(numeric[i])) p += posterior.probabilities[i];
        score.thresholds.push_back({t, static_cast<double>(p)});
    }
    score.posterior = std::move(posterior);
    return score;
}

inline TraitScore score_trait(const Engine& engine, const std::string& trait, const Evidence& evidence,
                              const std::vector<Threshold>& thresholds = {}) {
    auto result = engine.query(evidence, {trait});
    return score_posterior(trait, std::move(result.marginals.at(trait)), thresholds);
}

/// Probability of answering off-target (slip) or hitting a grade by chance (guess), modeled
/// as one symmetric mixture with the uniform distribution over the answer scale.
class NoiseSpec {
public:
    explicit NoiseSpec(double slip) : slip_(slip) {
        if (!(slip >= 0.0 && slip <= 1.0)) throw ModelError("noise level must lie in [0, 1]");
    }

    double slip() const noexcept { return slip_; }

private:
    double slip_;
};

/// Each row becomes (1 - e) * row + e / K for a child with K states.
inline Cpt apply_slip_noise(const Cpt& cpt, NoiseSpec noise) {
    const double e = noise.slip();
    if (e == 0.0) return cpt;
    Cpt out = cpt;
    for (auto& row : out.rows) {
        const double uniform = 1.0 / static_cast<double>(row.size());
        for (double& p : row) p = e == 1.0 ? uniform : (1.0 - e) * p + e * uniform;
    }
    return out;
}

/// Applies the noise model to every question-role table of a network.
inline Network apply_slip_noise(const Network& network, NoiseSpec noise) {
    std::vector<Cpt> cpts;
    for (std::size_t i = 0; i < network.size(); ++i) {
        const auto& cpt = network.cpts()[i];
        cpts.push_back(network.variables()[i].role == Role::question ? apply_slip_noise(cpt, noise) : cpt);
    }
    return build_network(network.variables(), std::move(cpts));
}

}  // namespace bnet

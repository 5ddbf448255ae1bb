#pragma once

// Command-line front end. `run` is the whole program; tools/bnet.cpp only forwards argv.
//
// Exit codes: 0 success, 2 usage error, 3 parse error, 4 impossible evidence,
// 5 internal invariant failure.

#include <cstdint>
#include <cstdio>
#include <exception>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "bnet/error.hpp"
#include "bnet/format.hpp"
#include "bnet/inference.hpp"
#include "bnet/model.hpp"
#include "bnet/netdef.hpp"
#include "bnet/scoring.hpp"
#include "bnet/simulate.hpp"

namespace bnet::cli {

enum ExitCode : int { kOk = 0, kUsage = 2, kParse = 3, kImpossible = 4, kInternal = 5 };

enum class OutputMode { table, json };

struct CliConfig {
    std::string subcommand;
    std::string network_path;
    std::vector<std::string> evidence;  // raw VAR=STATE[,VAR=STATE...] arguments
    std::vector<std::string> nodes;
    std::string trait;
    std::vector<std::string> thresholds;
    bool json = false;
    int decimals = 2;
    std::uint64_t seed = 0;
    std::size_t samples = 0;
    std::size_t shards = 1;
    double epsilon = 0.0;

    OutputMode mode() const { return json ? OutputMode::json : OutputMode::table; }
};

class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

namespace detail {

inline std::vector<std::string> split(const std::string& text, char sep) {
    std::vector<std::string> out;
    std::string item;
    std::istringstream in(text);
    while (std::getline(in, item, sep)) out.push_back(item);
    if (!text.empty() && text.back() == sep) out.emplace_back();
    return out;
}

/// VAR=STATE pairs, comma separated, possibly spread over repeated flags.
inline Evidence parse_evidence(const std::vector<std::string>& args) {
    Evidence ev;
    for (const auto& arg : args) {
        for (const auto& pair : split(arg, ',')) {
            auto eq = pair.find('=');
            if (eq == std::string::npos || eq == 0 || eq + 1 == pair.size() ||
                pair.find('=', eq + 1) != std::string::npos)
                throw UsageError("malformed evidence '" + pair + "', expected VAR=STATE");
            try {
                ev.set(pair.substr(0, eq), pair.substr(eq + 1));
            } catch (const ModelError& e) {
                throw UsageError(e.what());
            }
        }
    }
    return ev;
}

inline std::vector<std::string> parse_nodes(const std::vector<std::string>& args) {
    std::vector<std::string> out;
    for (const auto& arg : args)
        for (auto& n : split(arg, ',')) {
            if (n.empty()) throw UsageError("empty node name in '" + arg + "'");
            out.push_back(std::move(n));
        }
    return out;
}

inline std::string fixed(double x, int decimals) { return format_fixed(x, decimals); }

inline std::string pad_left(const std::string& s, std::size_t width) {
    return s.size() >= width ? s : std::string(width - s.size(), ' ') + s;
}

inline Network load(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw UsageError("cannot read '" + path + "'");
    std::ostringstream text;
    text << in.rdbuf();
    return parse_network(text.str());
}

inline void print_block(std::ostream& out, const std::string& name, const Marginal& m, int decimals) {
    std::vector<std::string> values;
    for (double p : m.probabilities) values.push_back(fixed(p, decimals));
    std::string header, line;
    for (std::size_t i = 0; i < values.size(); ++i) {
        const std::size_t w = std::max(values[i].size(), m.states[i].size());
        header += (i ? " " : "") + pad_left(m.states[i], w);
        line += (i ? " " : "") + pad_left(values[i], w);
    }
    out << name << '\n' << header << '\n' << line << '\n';
}

inline std::string general(double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6g", x);
    return buf;
}

inline int cmd_validate(const CliConfig& cfg, std::ostream& out) {
    auto net = load(cfg.network_path);
    out << "OK: " << net.size() << " variables, " << net.edge_count() << " edges\n";
    return kOk;
}

inline int cmd_marginals(const CliConfig& cfg, std::ostream& out) {
    auto evidence = parse_evidence(cfg.evidence);
    auto nodes = parse_nodes(cfg.nodes);
    Engine engine(load(cfg.network_path));
    if (nodes.empty()) nodes = engine.network().topological_order();
    auto result = engine.query(evidence, nodes);
    if (cfg.mode() == OutputMode::json) {
        out << export_result_json(result);
        return kOk;
    }
    for (const auto& n : nodes) print_block(out, n, result.marginals.at(n), cfg.decimals);
    if (!evidence.empty()) out << "P(evidence) = " << general(result.evidence_probability) << '\n';
    return kOk;
}

inline int cmd_posterior(const CliConfig& cfg, std::ostream& out) {
    auto evidence = parse_evidence(cfg.evidence);
    std::vector<Threshold> thresholds;
    for (const auto& t : cfg.thresholds) {
        try {
            thresholds.push_back(parse_threshold(t));
        } catch (const ModelError& e) {
            throw UsageError(e.what());
        }
    }
    Engine engine(load(cfg.network_path));
    auto result = engine.query(evidence, {cfg.trait});
    auto score = score_posterior(cfg.trait, result.marginals.at(cfg.trait), thresholds);
    if (cfg.mode() == OutputMode::json) {
        out << export_score_json(score, result.evidence_probability);
        return kOk;
    }
    out << score.variable << ':';
    for (std::size_t i = 0; i < score.posterior.states.size(); ++i)
        out << ' ' << score.posterior.states[i] << "→" << fixed(score.posterior.probabilities[i], cfg.decimals);
    out << "\nMAP: " << score.map_state << '\n';
    out << "expected level: " << (score.expected_level ? fixed(*score.expected_level, cfg.decimals) : "n/a") << '\n';
    for (const auto& t : score.thresholds)
        out << "P(" << score.variable << ' ' << to_string(t.threshold.comparator) << ' '
            << detail::general(t.threshold.level) << ") = " << fixed(t.probability, cfg.decimals) << '\n';
    return kOk;
}

inline int cmd_joint(const CliConfig& cfg, std::ostream& out) {
    auto evidence = parse_evidence(cfg.evidence);
    auto nodes = parse_nodes(cfg.nodes);
    if (nodes.empty()) throw UsageError("joint needs --nodes");
    Engine engine(load(cfg.network_path));
    auto joint = engine.query_joint(evidence, nodes);
    if (cfg.mode() == OutputMode::json) {
        out << export_joint_json(joint, engine.network());
        return kOk;
    }
    std::vector<std::size_t> width;
    for (const auto& n : nodes) {
        std::size_t w = n.size();
        for (const auto& s : engine.network().variable(n).states) w = std::max(w, s.size());
        width.push_back(w);
    }
    for (std::size_t i = 0; i < nodes.size(); ++i) out << pad_left(nodes[i], width[i]) << ' ';
    out << "P\n";
    std::vector<std::size_t> counter(nodes.size(), 0);
    for (std::size_t k = 0; k < joint.size(); ++k) {
        for (std::size_t i = 0; i < nodes.size(); ++i)
            out << pad_left(engine.network().variable(nodes[i]).states[counter[i]], width[i]) << ' ';
        out << fixed(joint.values()[k], cfg.decimals) << '\n';
        for (std::size_t i = counter.size(); i-- > 0;) {
            if (++counter[i] < joint.scope()[i].cardinality) break;
            counter[i] = 0;
        }
    }
    return kOk;
}

inline int cmd_sample(const CliConfig& cfg, std::ostream& out) {
    auto evidence = parse_evidence(cfg.evidence);
    if (cfg.samples == 0) throw UsageError("sample needs -n >= 1");
    auto net = load(cfg.network_path);
    try {
        validate(net, evidence);
    } catch (const ModelError& e) {
        throw UsageError(e.what());
    }
    auto set = evidence.empty() ? ancestral_sample(net, cfg.samples, cfg.seed, cfg.shards)
                                : likelihood_weighted_sample(net, evidence, cfg.samples, cfg.seed, cfg.shards);
    out << serialize_samples(set);
    return kOk;
}

inline int cmd_dot(const CliConfig& cfg, std::ostream& out) {
    out << export_dot(load(cfg.network_path));
    return kOk;
}

inline int cmd_noise(const CliConfig& cfg, std::ostream& out) {
    std::optional<NoiseSpec> noise;
    try {
        noise.emplace(cfg.epsilon);
    } catch (const ModelError& e) {
        throw UsageError(e.what());
    }
    out << serialize_network(apply_slip_noise(load(cfg.network_path), *noise));
    return kOk;
}

}  // namespace detail

inline int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CliConfig cfg;
    CLI::App app{"Exact inference and trait scoring for discrete Bayesian networks", "bnet"};
    app.require_subcommand(1);

    auto add_file = [&](CLI::App* sub) { sub->add_option("file", cfg.network_path, "Network definition (.bnet)")->required(); };
    auto add_evidence = [&](CLI::App* sub) {
        sub->add_option("--evidence,-e", cfg.evidence, "Observed answers as VAR=STATE[,VAR=STATE...]");
    };
    auto add_output = [&](CLI::App* sub) {
        sub->add_flag("--json", cfg.json, "Emit JSON instead of a table");
        sub->add_option("--decimals", cfg.decimals, "Digits after the decimal point in tables")
            ->check(CLI::Range(0, 17));
    };

    auto* validate_cmd = app.add_subcommand("validate", "Check a network definition");
    add_file(validate_cmd);

    auto* marginals_cmd = app.add_subcommand("marginals", "Posterior marginals of selected nodes");
    add_file(marginals_cmd);
    marginals_cmd->add_option("--nodes", cfg.nodes, "Comma separated node names (default: all)");
    add_evidence(marginals_cmd);
    add_output(marginals_cmd);

    auto* posterior_cmd = app.add_subcommand("posterior", "Score a trait given answers");
    add_file(posterior_cmd);
    posterior_cmd->add_option("--trait", cfg.trait, "Trait variable")->required();
    add_evidence(posterior_cmd);
    posterior_cmd->add_option("--threshold", cfg.thresholds, "Level comparison such as \">=3\"");
    add_output(posterior_cmd);

    auto* joint_cmd = app.add_subcommand("joint", "Joint posterior table over nodes");
    add_file(joint_cmd);
    joint_cmd->add_option("--nodes", cfg.nodes, "Comma separated node names")->required();
    add_evidence(joint_cmd);
    add_output(joint_cmd);

    auto* sample_cmd = app.add_subcommand("sample", "Draw synthetic respondents");
    add_file(sample_cmd);
    sample_cmd->add_option("-n", cfg.samples, "Number of samples")->required();
    sample_cmd->add_option("--seed", cfg.seed, "Generator seed")->required();
    sample_cmd->add_option("--shards", cfg.shards, "Parallel shards")->check(CLI::PositiveNumber);
    add_evidence(sample_cmd);

    auto* dot_cmd = app.add_subcommand("dot", "Print the network as a DOT digraph");
    add_file(dot_cmd);

    auto* noise_cmd = app.add_subcommand("noise", "Mix question tables with uniform slip/guess noise");
    add_file(noise_cmd);
    noise_cmd->add_option("--epsilon", cfg.epsilon, "Noise level in [0, 1]")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n';
        return kUsage;
    }
    cfg.subcommand = app.get_subcommands().front()->get_name();

    try {
        if (cfg.subcommand == "validate") return detail::cmd_validate(cfg, out);
        if (cfg.subcommand == "marginals") return detail::cmd_marginals(cfg, out);
        if (cfg.subcommand == "posterior") return detail::cmd_posterior(cfg, out);
        if (cfg.subcommand == "joint") return detail::cmd_joint(cfg, out);
        if (cfg.subcommand == "sample") return detail::cmd_sample(cfg, out);
        if (cfg.subcommand == "dot") return detail::cmd_dot(cfg, out);
        if (cfg.subcommand == "noise") return detail::cmd_noise(cfg, out);
        err << "error: unknown subcommand\n";
        return kUsage;
    } catch (const UsageError& e) {
        err << "error: " << e.what() << '\n';
        return kUsage;
    } catch (const ParseError& e) {
        err << cfg.network_path << ':' << e.what() << '\n';
        return kParse;
    } catch (const ImpossibleEvidence& e) {
        err << "error: " << e.what() << '\n';
        return kImpossible;
    } catch (const ModelError& e) {
        err << "error: " << e.what() << '\n';
        return kUsage;
    } catch (const std::exception& e) {
        err << "internal error: " << e.what() << '\n';
        return kInternal;
    }
}

}  // namespace bnet::cli

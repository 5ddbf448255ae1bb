#pragma once

#include <cstddef>
#include <limits>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "bnet/error.hpp"
#include "bnet/factor.hpp"
#include "bnet/model.hpp"

namespace bnet {

/// Posterior over one variable's full, ordered state space.
struct Marginal {
    std::vector<std::string> states;
    std::vector<double> probabilities;

    friend bool operator==(const Marginal&, const Marginal&) = default;
};

struct QueryResult {
    std::map<std::string, Marginal> marginals;
    /// Mass of the evidence under the model before normalization; 1 without evidence.
    double evidence_probability = 1.0;
};

/// A compiled network: one factor per Cpt plus the moral interaction graph used for
/// elimination ordering. Evidence is supplied per call, so an Engine may be shared.
class Engine {
public:
    explicit Engine(Network network) : network_(std::move(network)) {
        factors_.reserve(network_.size());
        for (const auto& cpt : network_.cpts()) factors_.push_back(factor_from_cpt(cpt, network_));
        for (const auto& v : network_.variables()) graph_[v.name];
        for (const auto& f : factors_)
            for (const auto& a : f.scope())
                for (const auto& b : f.scope())
                    if (a.name != b.name) graph_[a.name].insert(b.name);
    }

    const Network& network() const noexcept { return network_; }

    /// Copy of this engine with `evidence` folded into its factors. Later queries condition
    /// on it in addition to their own evidence, which must not repeat its variables.
    Engine condition(const Evidence& evidence) const {
        validate(network_, evidence);
        Engine out = *this;
        out.absorbed_ = absorbed_.merged(evidence);
        for (auto& f : out.factors_)
            for (const auto& [var, state] : evidence)
                if (f.has(var)) f = reduce(f, network_.variable(var), state);
        return out;
    }

    const Evidence& absorbed() const noexcept { return absorbed_; }
    const std::vector<Factor>& factors() const noexcept { return factors_; }
    const std::map<std::string, std::set<std::string>>& interaction_graph() const noexcept { return graph_; }

    /// Every variable outside `keep`, in iterated min-fill order. Ties go to the smaller
    /// resulting factor, then to the lexicographically smaller name.
    std::vector<std::string> elimination_order(const std::set<std::string>& keep) const {
        return elimination_order(keep, {});
    }

    /// Variables in `removed` are deleted from the graph before ordering (used for evidence).
    std::vector<std::string> elimination_order(const std::set<std::string>& keep,
                                               const std::set<std::string>& removed) const {
        auto graph = graph_;
        for (const auto& r : removed) {
            for (const auto& nb : graph[r]) graph[nb].erase(r);
            graph.erase(r);
        }
        std::set<std::string> candidates;
        for (const auto& [name, _] : graph)
            if (!keep.count(name)) candidates.insert(name);

        std::vector<std::string> order;
        while (!candidates.empty()) {
            const std::string* best = nullptr;
            std::size_t best_fill = 0;
            double best_size = 0.0;
            for (const auto& v : candidates) {  // lexicographic, so strict comparisons keep the first tie
                const auto& nbrs = graph[v];
                std::size_t fill = 0;
                for (auto i = nbrs.begin(); i != nbrs.end(); ++i)
                    for (auto j = std::next(i); j != nbrs.end(); ++j)
                        if (!graph[*i].count(*j)) ++fill;
                double size = static_cast<double>(network_.variable(v).cardinality());
                for (const auto& nb : nbrs) size *= static_cast<double>(network_.variable(nb).cardinality());
                if (!best || fill < best_fill || (fill == best_fill && size < best_size)) {
                    best = &v;
                    best_fill = fill;
                    best_size = size;
                }
            }
            std::string chosen = *best;
            const auto nbrs = graph[chosen];
            for (auto i = nbrs.begin(); i != nbrs.end(); ++i) {
                graph[*i].erase(chosen);
                for (auto j = std::next(i); j != nbrs.end(); ++j) {
                    graph[*i].insert(*j);
                    graph[*j].insert(*i);
                }
            }
            graph.erase(chosen);
            candidates.erase(chosen);
            order.push_back(std::move(chosen));
        }
        return order;
    }

    /// Posterior marginal for each node given `evidence`. An evidenced node yields a point
    /// mass on its observed state. Throws ImpossibleEvidence when the evidence has zero mass.
    QueryResult query(const Evidence& given, const std::vector<std::string>& nodes) const {
        check_nodes(nodes);
        validate(network_, given);
        const Evidence evidence = absorbed_.merged(given);

        const auto reduced = reduce_all(evidence);
        std::set<std::string> observed;
        for (const auto& [var, _] : evidence) observed.insert(var);

        // Without evidence the contraction is 1 up to rounding; report it exactly.
        QueryResult result;
        if (!evidence.empty()) result.evidence_probability = eliminate(reduced, {}, observed).total();
        if (result.evidence_probability == 0.0) throw ImpossibleEvidence();

        for (const auto& node : nodes) {
            const auto& var = network_.variable(node);
            Marginal m{var.states, std::vector<double>(var.cardinality(), 0.0)};
            if (auto it = evidence.assignments().find(node); it != evidence.assignments().end()) {
                m.probabilities[*var.state_index(it->second)] = 1.0;
            } else {
                m.probabilities = normalize(eliminate(reduced, {node}, observed)).values();
            }
            result.marginals.emplace(node, std::move(m));
        }
        return result;
    }

    QueryResult query(const std::vector<std::string>& nodes) const { return query(Evidence{}, nodes); }

    /// Normalized joint posterior over `nodes`, with scope in the given order.
    Factor query_joint(const Evidence& given, const std::vector<std::string>& nodes) const {
        check_nodes(nodes);
        validate(network_, given);
        const Evidence evidence = absorbed_.merged(given);

        std::set<std::string> keep(nodes.begin(), nodes.end());
        Evidence hidden;  // evidence on variables outside the requested scope
        std::vector<Factor> indicators;
        for (const auto& [var, state] : evidence) {
            if (keep.count(var)) {
                const auto& v = network_.variable(var);
                std::vector<double> ind(v.cardinality(), 0.0);
                ind[*v.state_index(state)] = 1.0;
                indicators.emplace_back(std::vector<ScopeEntry>{{var, v.cardinality()}}, std::move(ind));
            } else {
                hidden.set(var, state);
            }
        }
        auto factors = reduce_all(hidden);
        factors.insert(factors.end(), indicators.begin(), indicators.end());
        std::set<std::string> observed;
        for (const auto& [var, _] : hidden) observed.insert(var);

        return normalize(permute(eliminate(factors, keep, observed), nodes));
    }

private:
    void check_nodes(const std::vector<std::string>& nodes) const {
        if (nodes.empty()) throw ModelError("query needs at least one node");
        std::set<std::string> seen;
        for (const auto& n : nodes) {
            if (!network_.contains(n)) throw ModelError("unknown node '" + n + "'");
            if (!seen.insert(n).second) throw ModelError("node '" + n + "' requested twice");
        }
    }

    std::vector<Factor> reduce_all(const Evidence& evidence) const {
        std::vector<Factor> out;
        out.reserve(factors_.size());
        for (const auto& f : factors_) {
            Factor g = f;
            for (const auto& [var, state] : evidence)
                if (g.has(var)) g = reduce(g, network_.variable(var), state);
            out.push_back(std::move(g));
        }
        return out;
    }

    // Sums out every variable outside `keep` and returns the product of what remains.
    Factor eliminate(std::vector<Factor> factors, const std::set<std::string>& keep,
                     const std::set<std::string>& observed) const {
        for (const auto& var : elimination_order(keep, observed)) {
            Factor joined;
            std::vector<Factor> rest;
            rest.reserve(factors.size());
            for (auto& f : factors) {
                if (f.has(var))
                    joined = product(joined, f);
                else
                    rest.push_back(std::move(f));
            }
            // A variable touched by no factor has nothing to sum.
            if (joined.has(var)) rest.push_back(marginalize(joined, var));
            factors = std::move(rest);
        }
        Factor out;
        for (const auto& f : factors) out = product(out, f);
        return out;
    }

    Network network_;
    std::vector<Factor> factors_;
    std::map<std::string, std::set<std::string>> graph_;
    Evidence absorbed_;
};

inline Engine compile(Network network) { return Engine(std::move(network)); }

inline constexpr std::size_t kDefaultBruteForceCap = 10'000'000;

/// Full joint by direct enumeration: P(x, e) for every configuration x of the unobserved
/// variables, scoped in topological order. Independent of the elimination code path.
inline Factor brute_force_joint(const Network& network, const Evidence& evidence,
                                std::size_t cap = kDefaultBruteForceCap) {
    validate(network, evidence);
    const auto& vars = network.variables();
    const std::size_t n = vars.size();

    double configs = 1.0;
    for (const auto& v : vars) configs *= static_cast<double>(v.cardinality());
    if (configs > static_cast<double>(cap))
        throw std::length_error("joint state space of " + std::to_string(static_cast<long long>(configs)) +
                                " exceeds the enumeration cap of " + std::to_string(cap));

    std::vector<std::size_t> fixed(n, std::numeric_limits<std::size_t>::max());
    for (const auto& [var, state] : evidence) {
        auto i = network.index_of(var);
        fixed[i] = *vars[i].state_index(state);
    }

    // Free variables in topological order; the last varies fastest.
    std::vector<std::size_t> free_vars;
    std::vector<ScopeEntry> scope;
    for (const auto& name : network.topological_order()) {
        auto i = network.index_of(name);
        if (fixed[i] == std::numeric_limits<std::size_t>::max()) {
            free_vars.push_back(i);
            scope.push_back({name, vars[i].cardinality()});
        }
    }

    std::vector<std::size_t> assignment(n, 0);
    for (std::size_t i = 0; i < n; ++i)
        if (fixed[i] != std::numeric_limits<std::size_t>::max()) assignment[i] = fixed[i];

    std::size_t total = 1;
    for (const auto& e : scope) total *= e.cardinality;
    std::vector<double> values(total);
    for (std::size_t k = 0; k < total; ++k) {
        std::size_t rem = k;
        for (std::size_t j = free_vars.size(); j-- > 0;) {
            const auto card = vars[free_vars[j]].cardinality();
            assignment[free_vars[j]] = rem % card;
            rem /= card;
        }
        double p = 1.0;
        for (std::size_t v = 0; v < n; ++v)
            p *= network.cpts()[v].rows[network.parent_config(v, assignment)][assignment[v]];
        values[k] = p;
    }
    return Factor(std::move(scope), std::move(values));
}

}  // namespace bnet

#pragma once

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstddef>
#include <functional>
#include <initializer_list>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "bnet/error.hpp"

namespace bnet {

enum class Role { unspecified, trait, question };

inline std::string_view to_string(Role role) {
    switch (role) {
        case Role::trait: return "trait";
        case Role::question: return "question";
        case Role::unspecified: break;
    }
    return "unspecified";
}

/// A discrete variable with an ordered state space. State order defines table layout.
struct Variable {
    std::string name;
    std::vector<std::string> states;
    Role role = Role::unspecified;

    std::size_t cardinality() const noexcept { return states.size(); }

    std::optional<std::size_t> state_index(std::string_view label) const {
        for (std::size_t i = 0; i < states.size(); ++i)
            if (states[i] == label) return i;
        return std::nullopt;
    }

    friend bool operator==(const Variable&, const Variable&) = default;
};

/// P(child | parents). One row per parent configuration, enumerated row-major with the
/// last listed parent varying fastest; one column per child state.
struct Cpt {
    std::string child;
    std::vector<std::string> parents;
    std::vector<std::vector<double>> rows;

    friend bool operator==(const Cpt&, const Cpt&) = default;
};

inline bool is_valid_identifier(std::string_view name) {
    if (name.empty()) return false;
    auto head = static_cast<unsigned char>(name.front());
    if (!(std::isalpha(head) || head == '_')) return false;
    return std::all_of(name.begin(), name.end(), [](char ch) {
        auto c = static_cast<unsigned char>(ch);
        return std::isalnum(c) || c == '_' || c == '.' || c == '-';
    });
}

namespace detail {

inline bool is_valid_state_label(std::string_view label) {
    return !label.empty() && label.find_first_of("\n\r\t") == std::string_view::npos;
}

// Rows already summing to 1 within this tolerance are stored verbatim, so re-building a
// normalized network reproduces it bit for bit.
inline constexpr double kRowSumTolerance = 1e-12;

}  // namespace detail

class Network;
Network build_network(std::vector<Variable> variables, std::vector<Cpt> cpts);

/// Validated, immutable DAG of variables with exactly one Cpt each.
class Network {
public:
    const std::vector<Variable>& variables() const noexcept { return variables_; }

    /// cpts()[i] is the table of variables()[i].
    const std::vector<Cpt>& cpts() const noexcept { return cpts_; }

    std::size_t size() const noexcept { return variables_.size(); }

    bool contains(std::string_view name) const { return index_.find(name) != index_.end(); }

    std::size_t index_of(std::string_view name) const {
        auto it = index_.find(name);
        if (it == index_.end()) throw ModelError("unknown variable '" + std::string(name) + "'");
        return it->second;
    }

    const Variable& variable(std::string_view name) const { return variables_[index_of(name)]; }
    const Cpt& cpt(std::string_view name) const { return cpts_[index_of(name)]; }

    /// Parents precede children; ties broken by lexicographic name.
    const std::vector<std::string>& topological_order() const noexcept { return topo_; }

    std::size_t edge_count() const noexcept {
        std::size_t n = 0;
        for (const auto& c : cpts_) n += c.parents.size();
        return n;
    }

    /// Row of `cpt(child)` selected by a full assignment (state indices, indexed like variables()).
    std::size_t parent_config(std::size_t child, std::span<const std::size_t> assignment) const {
        std::size_t row = 0;
        for (std::size_t p : parent_index_[child]) row = row * variables_[p].cardinality() + assignment[p];
        return row;
    }

    /// Variable indices of the parents of variables()[child], in Cpt order.
    const std::vector<std::size_t>& parent_indices(std::size_t child) const { return parent_index_[child]; }

    /// Structural equality, independent of declaration order.
    friend bool operator==(const Network& a, const Network& b) {
        if (a.variables_.size() != b.variables_.size()) return false;
        for (std::size_t i = 0; i < a.variables_.size(); ++i) {
            auto it = b.index_.find(a.variables_[i].name);
            if (it == b.index_.end()) return false;
            if (!(a.variables_[i] == b.variables_[it->second])) return false;
            if (!(a.cpts_[i] == b.cpts_[it->second])) return false;
        }
        return true;
    }

private:
    friend Network build_network(std::vector<Variable>, std::vector<Cpt>);

    Network() = default;

    std::vector<Variable> variables_;
    std::vector<Cpt> cpts_;
    std::map<std::string, std::size_t, std::less<>> index_;
    std::vector<std::vector<std::size_t>> parent_index_;
    std::vector<std::string> topo_;
};

namespace detail {

// Kahn's algorithm with a lexicographically ordered ready set. Returns an empty vector
// when the parent relation has a cycle.
inline std::vector<std::size_t> kahn_order(const std::vector<Variable>& vars,
                                           const std::vector<std::vector<std::size_t>>& parents) {
    const std::size_t n = vars.size();
    std::vector<std::size_t> pending(n);
    std::vector<std::vector<std::size_t>> children(n);
    for (std::size_t c = 0; c < n; ++c) {
        pending[c] = parents[c].size();
        for (std::size_t p : parents[c]) children[p].push_back(c);
    }
    auto by_name = [&](std::size_t a, std::size_t b) { return vars[a].name < vars[b].name; };
    std::set<std::size_t, decltype(by_name)> ready(by_name);
    for (std::size_t v = 0; v < n; ++v)
        if (pending[v] == 0) ready.insert(v);

    std::vector<std::size_t> order;
    order.reserve(n);
    while (!ready.empty()) {
        std::size_t v = *ready.begin();
        ready.erase(ready.begin());
        order.push_back(v);
        for (std::size_t c : children[v])
            if (--pending[c] == 0) ready.insert(c);
    }
    if (order.size() != n) order.clear();
    return order;
}

// Walks parent links from a vertex left over by Kahn's algorithm until a vertex repeats.
inline std::vector<std::string> find_cycle(const std::vector<Variable>& vars,
                                           const std::vector<std::vector<std::size_t>>& parents,
                                           const std::vector<bool>& settled) {
    std::size_t start = vars.size();
    for (std::size_t v = 0; v < vars.size(); ++v)
        if (!settled[v] && (start == vars.size() || vars[v].name < vars[start].name)) start = v;

    std::vector<std::size_t> path;
    std::vector<std::size_t> position(vars.size(), vars.size());
    std::size_t v = start;
    while (position[v] == vars.size()) {
        position[v] = path.size();
        path.push_back(v);
        std::size_t next = vars.size();
        for (std::size_t p : parents[v])
            if (!settled[p] && (next == vars.size() || vars[p].name < vars[next].name)) next = p;
        v = next;
    }
    // path follows child -> parent links; report the cycle in parent -> child order.
    std::vector<std::string> cycle;
    for (std::size_t i = path.size(); i-- > position[v];) cycle.push_back(vars[path[i]].name);
    return cycle;
}

}  // namespace detail

/// Validates and assembles a network. Rows may be given as nonnegative weights (for example
/// percentages) and are normalized per row.
inline Network build_network(std::vector<Variable> variables, std::vector<Cpt> cpts) {
    Network net;
    for (std::size_t i = 0; i < variables.size(); ++i) {
        const auto& v = variables[i];
        if (!is_valid_identifier(v.name)) throw ModelError("invalid variable name '" + v.name + "'");
        if (v.states.size() < 2)
            throw ModelError("variable '" + v.name + "' needs at least 2 states");
        for (std::size_t s = 0; s < v.states.size(); ++s) {
            if (!detail::is_valid_state_label(v.states[s]))
                throw ModelError("variable '" + v.name + "' has an invalid state label");
            for (std::size_t t = 0; t < s; ++t)
                if (v.states[s] == v.states[t])
                    throw ModelError("variable '" + v.name + "' repeats state '" + v.states[s] + "'");
        }
        if (!net.index_.emplace(v.name, i).second)
            throw ModelError("duplicate variable '" + v.name + "'");
    }
    if (variables.empty()) throw ModelError("network has no variables");

    const std::size_t n = variables.size();
    std::vector<std::optional<Cpt>> slots(n);
    for (auto& cpt : cpts) {
        auto it = net.index_.find(cpt.child);
        if (it == net.index_.end()) throw ModelError("table for unknown variable '" + cpt.child + "'");
        if (slots[it->second]) throw ModelError("duplicate table for variable '" + cpt.child + "'");
        slots[it->second] = std::move(cpt);
    }

    net.parent_index_.resize(n);
    for (std::size_t c = 0; c < n; ++c) {
        if (!slots[c]) throw ModelError("variable '" + variables[c].name + "' has no table");
        Cpt& cpt = *slots[c];
        const auto& child = variables[c];

        std::size_t configs = 1;
        for (const auto& p : cpt.parents) {
            auto it = net.index_.find(p);
            if (it == net.index_.end())
                throw ModelError("table for '" + child.name + "' names unknown parent '" + p + "'");
            if (it->second == c) throw CycleError({child.name});
            auto& idx = net.parent_index_[c];
            if (std::find(idx.begin(), idx.end(), it->second) != idx.end())
                throw ModelError("table for '" + child.name + "' repeats parent '" + p + "'");
            idx.push_back(it->second);
            configs *= variables[it->second].cardinality();
        }
        if (cpt.rows.size() != configs)
            throw ModelError("table for '" + child.name + "' has " + std::to_string(cpt.rows.size()) +
                             " rows, expected " + std::to_string(configs));
        for (std::size_t r = 0; r < cpt.rows.size(); ++r) {
            auto& row = cpt.rows[r];
            if (row.size() != child.cardinality())
                throw ModelError("table for '" + child.name + "' row " + std::to_string(r + 1) + " has " +
                                 std::to_string(row.size()) + " entries, expected " +
                                 std::to_string(child.cardinality()));
            double sum = 0.0;
            for (double x : row) {
                if (!std::isfinite(x) || x < 0.0)
                    throw ModelError("table for '" + child.name + "' has a negative or non-finite entry");
                sum += x;
            }
            if (sum == 0.0)
                throw ModelError("table for '" + child.name + "' row " + std::to_string(r + 1) +
                                 " sums to zero");
            if (std::abs(sum - 1.0) > detail::kRowSumTolerance)
                for (double& x : row) x /= sum;
        }
    }

    auto order = detail::kahn_order(variables, net.parent_index_);
    if (order.empty()) {
        // Kahn leaves exactly the vertices on or downstream of a cycle unsettled.
        auto partial_parents = net.parent_index_;
        std::vector<bool> settled(n, false);
        bool progress = true;
        while (progress) {
            progress = false;
            for (std::size_t v = 0; v < n; ++v) {
                if (settled[v]) continue;
                bool all = std::all_of(partial_parents[v].begin(), partial_parents[v].end(),
                                       [&](std::size_t p) { return settled[p]; });
                if (all) settled[v] = progress = true;
            }
        }
        throw CycleError(detail::find_cycle(variables, net.parent_index_, settled));
    }

    net.topo_.reserve(n);
    for (std::size_t v : order) net.topo_.push_back(variables[v].name);
    net.variables_ = std::move(variables);
    net.cpts_.reserve(n);
    for (auto& slot : slots) net.cpts_.push_back(std::move(*slot));
    return net;
}

inline std::vector<std::string> topological_order(const Network& network) {
    return network.topological_order();
}

/// Observed states for a subset of variables. Each variable may be assigned once.
class Evidence {
public:
    Evidence() = default;

    Evidence(std::initializer_list<std::pair<std::string, std::string>> items) {
        for (const auto& [var, state] : items) set(var, state);
    }

    void set(std::string variable, std::string state) {
        if (assignments_.count(variable))
            throw ModelError("variable '" + variable + "' appears twice in the evidence");
        assignments_.emplace(std::move(variable), std::move(state));
    }

    bool contains(std::string_view variable) const { return assignments_.find(variable) != assignments_.end(); }
    bool empty() const noexcept { return assignments_.empty(); }
    std::size_t size() const noexcept { return assignments_.size(); }

    const std::map<std::string, std::string, std::less<>>& assignments() const noexcept { return assignments_; }
    auto begin() const noexcept { return assignments_.begin(); }
    auto end() const noexcept { return assignments_.end(); }

    /// Union of two evidence sets; a variable present in both is an error.
    Evidence merged(const Evidence& other) const {
        Evidence out = *this;
        for (const auto& [var, state] : other) out.set(var, state);
        return out;
    }

private:
    std::map<std::string, std::string, std::less<>> assignments_;
};

/// Throws ModelError unless every assignment names a variable and one of its states.
inline void validate(const Network& network, const Evidence& evidence) {
    for (const auto& [var, state] : evidence) {
        if (!network.contains(var)) throw ModelError("evidence names unknown variable '" + var + "'");
        if (!network.variable(var).state_index(state))
            throw ModelError("evidence state '" + state + "' is not a state of '" + var + "'");
    }
}

}  // namespace bnet

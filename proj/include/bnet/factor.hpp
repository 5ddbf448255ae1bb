#pragma once

#include <algorithm>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "bnet/error.hpp"
#include "bnet/model.hpp"

namespace bnet {

struct ScopeEntry {
    std::string name;
    std::size_t cardinality = 0;

    friend bool operator==(const ScopeEntry&, const ScopeEntry&) = default;
};

/// Dense nonnegative table over an ordered scope, row-major with the last scope variable
/// varying fastest. Factors are unnormalized potentials; an empty scope holds one scalar.
class Factor {
public:
    Factor() : values_{1.0} {}

    Factor(std::vector<ScopeEntry> scope, std::vector<double> values)
        : scope_(std::move(scope)), values_(std::move(values)) {
        std::size_t expected = 1;
        for (std::size_t i = 0; i < scope_.size(); ++i) {
            if (scope_[i].cardinality == 0) throw ModelError("factor variable '" + scope_[i].name + "' has no states");
            for (std::size_t j = 0; j < i; ++j)
                if (scope_[j].name == scope_[i].name)
                    throw ModelError("factor scope repeats '" + scope_[i].name + "'");
            expected *= scope_[i].cardinality;
        }
        if (values_.size() != expected)
            throw ModelError("factor has " + std::to_string(values_.size()) + " values, expected " +
                             std::to_string(expected));
        for (double v : values_)
            if (!(v >= 0.0)) throw ModelError("factor values must be nonnegative");
    }

    static Factor scalar(double value) { return Factor({}, {value}); }

    const std::vector<ScopeEntry>& scope() const noexcept { return scope_; }
    const std::vector<double>& values() const noexcept { return values_; }
    std::size_t size() const noexcept { return values_.size(); }

    std::optional<std::size_t> position(std::string_view name) const {
        for (std::size_t i = 0; i < scope_.size(); ++i)
            if (scope_[i].name == name) return i;
        return std::nullopt;
    }

    bool has(std::string_view name) const { return position(name).has_value(); }

    std::vector<std::string> names() const {
        std::vector<std::string> out;
        out.reserve(scope_.size());
        for (const auto& e : scope_) out.push_back(e.name);
        return out;
    }

    /// Sum of all entries, accumulated left to right in extended precision.
    double total() const {
        long double sum = 0.0L;
        for (double v : values_) sum += v;
        return static_cast<double>(sum);
    }

    /// Entry for a full assignment given in scope order.
    double at(std::span<const std::size_t> states) const { return values_[offset(states)]; }

    std::size_t offset(std::span<const std::size_t> states) const {
        std::size_t idx = 0;
        for (std::size_t i = 0; i < scope_.size(); ++i) idx = idx * scope_[i].cardinality + states[i];
        return idx;
    }

    std::vector<std::size_t> strides() const {
        std::vector<std::size_t> out(scope_.size(), 1);
        for (std::size_t i = scope_.size(); i-- > 1;) out[i - 1] = out[i] * scope_[i].cardinality;
        return out;
    }

    friend bool operator==(const Factor&, const Factor&) = default;

private:
    std::vector<ScopeEntry> scope_;
    std::vector<double> values_;
};

/// Scope is parents followed by the child; entry (r, c) is rows[r][c].
inline Factor factor_from_cpt(const Cpt& cpt, const Network& network) {
    std::vector<ScopeEntry> scope;
    for (const auto& p : cpt.parents) scope.push_back({p, network.variable(p).cardinality()});
    scope.push_back({cpt.child, network.variable(cpt.child).cardinality()});
    std::vector<double> values;
    for (const auto& row : cpt.rows) values.insert(values.end(), row.begin(), row.end());
    return Factor(std::move(scope), std::move(values));
}

/// Pointwise product over the union scope (a's variables, then b's new ones).
inline Factor product(const Factor& a, const Factor& b) {
    std::vector<ScopeEntry> scope = a.scope();
    for (const auto& e : b.scope()) {
        auto pos = a.position(e.name);
        if (!pos) {
            scope.push_back(e);
        } else if (a.scope()[*pos].cardinality != e.cardinality) {
            throw ModelError("state-count mismatch for '" + e.name + "' in factor product");
        }
    }

    const std::size_t rank = scope.size();
    const auto a_strides = a.strides();
    const auto b_strides = b.strides();
    std::vector<std::size_t> stride_a(rank, 0), stride_b(rank, 0), card(rank);
    std::size_t total = 1;
    for (std::size_t i = 0; i < rank; ++i) {
        card[i] = scope[i].cardinality;
        total *= card[i];
        if (auto p = a.position(scope[i].name)) stride_a[i] = a_strides[*p];
        if (auto p = b.position(scope[i].name)) stride_b[i] = b_strides[*p];
    }

    std::vector<double> values(total);
    std::vector<std::size_t> counter(rank, 0);
    std::size_t ia = 0, ib = 0;
    for (std::size_t k = 0; k < total; ++k) {
        values[k] = a.values()[ia] * b.values()[ib];
        // odometer increment, last variable fastest
        for (std::size_t i = rank; i-- > 0;) {
            if (++counter[i] < card[i]) {
                ia += stride_a[i];
                ib += stride_b[i];
                break;
            }
            counter[i] = 0;
            ia -= stride_a[i] * (card[i] - 1);
            ib -= stride_b[i] * (card[i] - 1);
        }
    }
    return Factor(std::move(scope), std::move(values));
}

/// Sums `var` out. Each output entry accumulates the summed states in ascending order.
inline Factor marginalize(const Factor& f, std::string_view var) {
    auto pos = f.position(var);
    if (!pos) throw ModelError("cannot marginalize '" + std::string(var) + "': not in factor scope");
    const auto strides = f.strides();
    const std::size_t inner = strides[*pos];
    const std::size_t card = f.scope()[*pos].cardinality;
    const std::size_t outer = f.size() / (inner * card);

    std::vector<ScopeEntry> scope = f.scope();
    scope.erase(scope.begin() + static_cast<std::ptrdiff_t>(*pos));
    std::vector<double> values(outer * inner);
    for (std::size_t o = 0; o < outer; ++o) {
        for (std::size_t i = 0; i < inner; ++i) {
            long double sum = 0.0L;
            for (std::size_t s = 0; s < card; ++s) sum += f.values()[(o * card + s) * inner + i];
            values[o * inner + i] = static_cast<double>(sum);
        }
    }
    return Factor(std::move(scope), std::move(values));
}

/// Slice of `f` at var = state; the variable leaves the scope and nothing is renormalized.
inline Factor reduce(const Factor& f, std::string_view var, std::size_t state) {
    auto pos = f.position(var);
    if (!pos) throw ModelError("cannot reduce '" + std::string(var) + "': not in factor scope");
    const std::size_t card = f.scope()[*pos].cardinality;
    if (state >= card) throw ModelError("state index out of range for '" + std::string(var) + "'");
    const std::size_t inner = f.strides()[*pos];
    const std::size_t outer = f.size() / (inner * card);

    std::vector<ScopeEntry> scope = f.scope();
    scope.erase(scope.begin() + static_cast<std::ptrdiff_t>(*pos));
    std::vector<double> values;
    values.reserve(outer * inner);
    for (std::size_t o = 0; o < outer; ++o) {
        auto first = f.values().begin() + static_cast<std::ptrdiff_t>((o * card + state) * inner);
        values.insert(values.end(), first, first + static_cast<std::ptrdiff_t>(inner));
    }
    return Factor(std::move(scope), std::move(values));
}

inline Factor reduce(const Factor& f, const Variable& var, std::string_view state) {
    auto idx = var.state_index(state);
    if (!idx) throw ModelError("unknown state '" + std::string(state) + "' for '" + var.name + "'");
    return reduce(f, var.name, *idx);
}

/// Rescales to unit mass. Zero mass means the conditioning evidence is impossible.
inline Factor normalize(const Factor& f) {
    long double sum = 0.0L;
    for (double v : f.values()) sum += v;
    if (sum == 0.0L) throw ImpossibleEvidence();
    std::vector<double> values(f.size());
    for (std::size_t i = 0; i < f.size(); ++i)
        values[i] = static_cast<double>(static_cast<long double>(f.values()[i]) / sum);
    return Factor(f.scope(), std::move(values));
}

/// Reorders the scope of `f` to `order`, which must be a permutation of its variable names.
inline Factor permute(const Factor& f, std::span<const std::string> order) {
    if (order.size() != f.scope().size())
        throw ModelError("permutation does not match factor scope");
    std::vector<ScopeEntry> scope;
    std::vector<std::size_t> source_stride;
    const auto strides = f.strides();
    for (const auto& name : order) {
        auto pos = f.position(name);
        if (!pos) throw ModelError("permutation names '" + name + "' outside the factor scope");
        scope.push_back(f.scope()[*pos]);
        source_stride.push_back(strides[*pos]);
    }
    std::vector<double> values(f.size());
    std::vector<std::size_t> counter(scope.size(), 0);
    std::size_t src = 0;
    for (std::size_t k = 0; k < values.size(); ++k) {
        values[k] = f.values()[src];
        for (std::size_t i = scope.size(); i-- > 0;) {
            if (++counter[i] < scope[i].cardinality) {
                src += source_stride[i];
                break;
            }
            counter[i] = 0;
            src -= source_stride[i] * (scope[i].cardinality - 1);
        }
    }
    return Factor(std::move(scope), std::move(values));
}

}  // namespace bnet

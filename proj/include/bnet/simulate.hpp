#pragma once

#include <cstddef>
#include <cstdint>
#include <future>
#include <map>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "bnet/error.hpp"
#include "bnet/inference.hpp"
#include "bnet/model.hpp"

namespace bnet {

/// Sampled respondents. Columns follow the network's topological order; rows hold state
/// indices into `states[column]`.
struct SampleSet {
    std::vector<std::string> columns;
    std::vector<std::vector<std::string>> states;
    std::vector<std::vector<std::size_t>> rows;
    std::vector<double> weights;
    std::uint64_t seed = 0;

    std::size_t size() const noexcept { return rows.size(); }

    const std::string& label(std::size_t row, std::size_t column) const {
        return states[column][rows[row][column]];
    }

    double total_weight() const {
        long double sum = 0.0L;
        for (double w : weights) sum += w;
        return static_cast<double>(sum);
    }

    /// Kish effective sample size, (sum w)^2 / sum w^2.
    double effective_sample_size() const {
        long double s = 0.0L, s2 = 0.0L;
        for (double w : weights) {
            s += w;
            s2 += static_cast<long double>(w) * w;
        }
        return s2 == 0.0L ? 0.0 : static_cast<double>(s * s / s2);
    }

    friend bool operator==(const SampleSet&, const SampleSet&) = default;
};

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

/// Shard k draws from mt19937_64 seeded with splitmix64(seed + k).
inline std::uint64_t shard_seed(std::uint64_t seed, std::size_t shard) {
    return splitmix64(seed + static_cast<std::uint64_t>(shard));
}

/// Uniform double in [0, 1) from the top 53 bits of one generator output.
inline double uniform01(std::mt19937_64& gen) { return static_cast<double>(gen() >> 11) * 0x1.0p-53; }

inline std::size_t draw(const std::vector<double>& probs, double u) {
    double cumulative = 0.0;
    std::size_t last_positive = 0;
    for (std::size_t i = 0; i < probs.size(); ++i) {
        if (probs[i] <= 0.0) continue;
        cumulative += probs[i];
        last_positive = i;
        if (u < cumulative) return i;
    }
    return last_positive;  // rounding left u above the accumulated mass
}

inline void sample_shard(const Network& network, const std::vector<std::size_t>& order,
                         const std::vector<std::size_t>& clamped, std::size_t n, std::uint64_t seed,
                         std::vector<std::vector<std::size_t>>& rows, std::vector<double>& weights) {
    constexpr auto kFree = static_cast<std::size_t>(-1);
    std::mt19937_64 gen(seed);
    std::vector<std::size_t> assignment(network.size(), 0);
    rows.reserve(n);
    weights.reserve(n);
    for (std::size_t r = 0; r < n; ++r) {
        double weight = 1.0;
        for (std::size_t v : order) {
            const auto& row = network.cpts()[v].rows[network.parent_config(v, assignment)];
            if (clamped[v] != kFree) {
                assignment[v] = clamped[v];
                weight *= row[clamped[v]];
            } else {
                assignment[v] = draw(row, uniform01(gen));
            }
        }
        std::vector<std::size_t> out;
        out.reserve(order.size());
        for (std::size_t v : order) out.push_back(assignment[v]);
        rows.push_back(std::move(out));
        weights.push_back(weight);
    }
}

inline SampleSet run_sampler(const Network& network, const Evidence& evidence, std::size_t n,
                             std::uint64_t seed, std::size_t shards) {
    if (n == 0) throw ModelError("sample count must be at least 1");
    if (shards == 0) shards = 1;
    validate(network, evidence);

    SampleSet set;
    set.seed = seed;
    std::vector<std::size_t> order;
    for (const auto& name : network.topological_order()) {
        order.push_back(network.index_of(name));
        set.columns.push_back(name);
        set.states.push_back(network.variable(name).states);
    }
    std::vector<std::size_t> clamped(network.size(), static_cast<std::size_t>(-1));
    for (const auto& [var, state] : evidence) clamped[network.index_of(var)] = *network.variable(var).state_index(state);

    std::vector<std::vector<std::vector<std::size_t>>> shard_rows(shards);
    std::vector<std::vector<double>> shard_weights(shards);
    std::vector<std::future<void>> jobs;
    for (std::size_t k = 0; k < shards; ++k) {
        const std::size_t count = n / shards + (k < n % shards ? 1 : 0);
        auto job = [&, k, count] {
            sample_shard(network, order, clamped, count, shard_seed(seed, k), shard_rows[k], shard_weights[k]);
        };
        if (shards == 1)
            job();
        else
            jobs.push_back(std::async(std::launch::async, job));
    }
    for (auto& j : jobs) j.get();

    set.rows.reserve(n);
    set.weights.reserve(n);
    for (std::size_t k = 0; k < shards; ++k) {
        for (auto& r : shard_rows[k]) set.rows.push_back(std::move(r));
        set.weights.insert(set.weights.end(), shard_weights[k].begin(), shard_weights[k].end());
    }
    return set;
}

}  // namespace detail

/// n independent joint draws, each variable sampled after its parents. Deterministic in
/// (network, n, seed, shards); shards only changes how the draws are split across threads.
inline SampleSet ancestral_sample(const Network& network, std::size_t n, std::uint64_t seed,
                                  std::size_t shards = 1) {
    return detail::run_sampler(network, Evidence{}, n, seed, shards);
}

/// Evidence variables are clamped and each row is weighted by the product of their
/// conditional probabilities given the sampled parents.
inline SampleSet likelihood_weighted_sample(const Network& network, const Evidence& evidence, std::size_t n,
                                            std::uint64_t seed, std::size_t shards = 1) {
    return detail::run_sampler(network, evidence, n, seed, shards);
}

inline std::map<std::string, Marginal> empirical_marginals(const SampleSet& samples,
                                                           const std::vector<std::string>& nodes) {
    std::map<std::string, Marginal> out;
    long double total = 0.0L;
    for (double w : samples.weights) total += w;
    if (total == 0.0L) throw ImpossibleEvidence("sample set has zero total weight");
    for (const auto& node : nodes) {
        std::size_t col = samples.columns.size();
        for (std::size_t c = 0; c < samples.columns.size(); ++c)
            if (samples.columns[c] == node) col = c;
        if (col == samples.columns.size()) throw ModelError("node '" + node + "' is not a sample column");

        std::vector<long double> mass(samples.states[col].size(), 0.0L);
        for (std::size_t r = 0; r < samples.size(); ++r) mass[samples.rows[r][col]] += samples.weights[r];
        Marginal m{samples.states[col], {}};
        for (auto x : mass) m.probabilities.push_back(static_cast<double>(x / total));
        out.emplace(node, std::move(m));
    }
    return out;
}

}  // namespace bnet

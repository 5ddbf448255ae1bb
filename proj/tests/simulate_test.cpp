#include <cmath>

#include "gtest/gtest.h"

#include "bnet/netdef.hpp"
#include "bnet/simulate.hpp"
#include "oracle.hpp"

namespace bnet {
namespace {

TEST(AncestralSample, TwoQuestionMarginal) {
    auto net = testing::load_fixture("ex2.bnet");
    auto samples = ancestral_sample(net, 100000, 1);
    EXPECT_EQ(samples.columns, (std::vector<std::string>{"F", "Q11", "Q12"}));
    auto m = empirical_marginals(samples, {"Q11"});
    const std::vector<double> exact{.26, .165, .075, .225, .275};
    for (std::size_t i = 0; i < exact.size(); ++i) EXPECT_NEAR(m.at("Q11").probabilities[i], exact[i], 0.01);
    for (double w : samples.weights) EXPECT_EQ(w, 1.0);
}

TEST(AncestralSample, PointMassPrior) {
    auto net = build_network({{"X", {"a", "b"}}}, {{"X", {}, {{1, 0}}}});
    auto samples = ancestral_sample(net, 1000, 3);
    for (std::size_t r = 0; r < samples.size(); ++r) EXPECT_EQ(samples.label(r, 0), "a");
    EXPECT_EQ(empirical_marginals(samples, {"X"}).at("X").probabilities, (std::vector<double>{1.0, 0.0}));
}

TEST(AncestralSample, SameSeedSameSamples) {
    auto net = testing::load_fixture("ex3.bnet");
    EXPECT_EQ(ancestral_sample(net, 500, 77), ancestral_sample(net, 500, 77));
    EXPECT_NE(ancestral_sample(net, 500, 77).rows, ancestral_sample(net, 500, 78).rows);
    EXPECT_EQ(serialize_samples(ancestral_sample(net, 50, 9)), serialize_samples(ancestral_sample(net, 50, 9)));
}

TEST(AncestralSample, ShardingIsDeterministicAndConcatenates) {
    auto net = testing::load_fixture("ex3.bnet");
    auto four = ancestral_sample(net, 1001, 5, 4);
    EXPECT_EQ(four, ancestral_sample(net, 1001, 5, 4));
    EXPECT_EQ(four.size(), 1001u);
    // the first shard is what a single-shard run with the same derived seed produces
    auto first = ancestral_sample(net, 251, 5, 1);
    for (std::size_t r = 0; r < 251; ++r) EXPECT_EQ(four.rows[r], first.rows[r]);
}

TEST(AncestralSample, RejectsZeroCount) {
    EXPECT_THROW(ancestral_sample(testing::load_fixture("ex2.bnet"), 0, 1), ModelError);
}

TEST(LikelihoodWeighting, TwoQuestionPosterior) {
    auto net = testing::load_fixture("ex2.bnet");
    auto samples = likelihood_weighted_sample(net, {{"Q11", "2"}, {"Q12", "3"}}, 200000, 2);
    auto m = empirical_marginals(samples, {"F", "Q11"});
    EXPECT_NEAR(m.at("F").probabilities[0], 10.0 / 11.0, 0.01);
    EXPECT_EQ(m.at("Q11").probabilities[1], 1.0);
    EXPECT_GT(samples.effective_sample_size(), 1000.0);
}

TEST(LikelihoodWeighting, EmptyEvidenceIsAncestral) {
    auto net = testing::load_fixture("ex3.bnet");
    auto lw = likelihood_weighted_sample(net, {}, 300, 4);
    EXPECT_EQ(lw, ancestral_sample(net, 300, 4));
}

TEST(LikelihoodWeighting, ImpossibleEvidenceHasZeroWeight) {
    auto net = testing::load_fixture("ex3.bnet");
    auto samples = likelihood_weighted_sample(net, {{"F", "0"}, {"Q14", "5"}}, 1000, 4);
    EXPECT_EQ(samples.total_weight(), 0.0);
    EXPECT_THROW(empirical_marginals(samples, {"Q11"}), ImpossibleEvidence);
}

TEST(EmpiricalMarginals, SingleEffectiveSample) {
    SampleSet set;
    set.columns = {"A"};
    set.states = {{"x", "y", "z"}};
    set.rows = {{0}, {1}, {2}};
    set.weights = {0.0, 0.0, 1.0};
    EXPECT_EQ(empirical_marginals(set, {"A"}).at("A").probabilities, (std::vector<double>{0, 0, 1}));
    EXPECT_THROW(empirical_marginals(set, {"B"}), ModelError);
}

TEST(EmpiricalMarginals, FiveQuestionAncestral) {
    auto net = testing::load_fixture("ex3.bnet");
    auto m = empirical_marginals(ancestral_sample(net, 200000, 11), {"Q14"});
    const std::vector<double> exact{.30, .25, .24, .14, .07};
    for (std::size_t i = 0; i < exact.size(); ++i) EXPECT_NEAR(m.at("Q14").probabilities[i], exact[i], 0.01);
}

TEST(SampleExport, TabSeparatedWithWeightColumn) {
    auto net = testing::load_fixture("ex2.bnet");
    auto text = serialize_samples(likelihood_weighted_sample(net, {{"Q11", "2"}}, 3, 1));
    EXPECT_EQ(text.substr(0, text.find('\n')), "F\tQ11\tQ12\tweight");
    std::size_t lines = 0;
    for (char c : text) lines += c == '\n';
    EXPECT_EQ(lines, 4u);
}

}  // namespace
}  // namespace bnet

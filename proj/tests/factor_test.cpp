#include <algorithm>
#include <cmath>
#include <random>

#include "gtest/gtest.h"

#include "bnet/factor.hpp"
#include "oracle.hpp"

namespace bnet {
namespace {

void expect_values_near(const Factor& f, const std::vector<double>& expected, double tol) {
    ASSERT_EQ(f.size(), expected.size());
    for (std::size_t i = 0; i < expected.size(); ++i) EXPECT_NEAR(f.values()[i], expected[i], tol) << "entry " << i;
}

class FactorTest : public ::testing::Test {
protected:
    Network net = testing::two_question_network();
    Factor prior = factor_from_cpt(net.cpt("F"), net);
    Factor q11 = factor_from_cpt(net.cpt("Q11"), net);
    Factor q12 = factor_from_cpt(net.cpt("Q12"), net);
};

TEST_F(FactorTest, FromCptLaysOutParentsThenChild) {
    EXPECT_EQ(q11.names(), (std::vector<std::string>{"F", "Q11"}));
    expect_values_near(q11, {.50, .30, .10, .05, .05, .02, .03, .05, .40, .50}, 1e-15);
    EXPECT_EQ(prior.names(), (std::vector<std::string>{"F"}));
    EXPECT_EQ(prior.values(), (std::vector<double>{0.5, 0.5}));
}

TEST_F(FactorTest, DeterministicRowKeepsExactZeroAndOne) {
    auto x = build_network({{"X", {"a", "b"}}}, {{"X", {}, {{1, 0}}}});
    auto f = factor_from_cpt(x.cpt("X"), x);
    EXPECT_EQ(f.values()[0], 1.0);
    EXPECT_EQ(f.values()[1], 0.0);
}

TEST_F(FactorTest, ProductThenSumGivesQuestionMarginal) {
    auto joint = product(prior, q11);
    EXPECT_EQ(joint.names(), (std::vector<std::string>{"F", "Q11"}));
    auto m = marginalize(joint, "F");
    // 0.5 * row(F=0) + 0.5 * row(F=1), by hand
    expect_values_near(m, {.26, .165, .075, .225, .275}, 1e-15);
}

TEST_F(FactorTest, UnitFactorIsIdentity) {
    EXPECT_EQ(product(q11, Factor{}), q11);
    EXPECT_EQ(product(Factor{}, q11), q11);
}

TEST_F(FactorTest, ProductScopeOrderAndCommutativity) {
    auto ab = product(q11, q12);
    auto ba = product(q12, q11);
    EXPECT_EQ(ab.names(), (std::vector<std::string>{"F", "Q11", "Q12"}));
    EXPECT_EQ(ba.names(), (std::vector<std::string>{"F", "Q12", "Q11"}));
    EXPECT_EQ(permute(ba, ab.names()), ab);
}

TEST_F(FactorTest, ProductRejectsCardinalityMismatch) {
    Factor bad({{"F", 3}}, {1, 1, 1});
    EXPECT_THROW(product(prior, bad), ModelError);
}

TEST_F(FactorTest, FullContractionYieldsScalarMass) {
    auto joint = product(product(prior, q11), q12);
    auto s = marginalize(marginalize(marginalize(joint, "Q12"), "Q11"), "F");
    EXPECT_TRUE(s.scope().empty());
    EXPECT_NEAR(s.values()[0], 1.0, 1e-15);
}

TEST_F(FactorTest, MarginalizeOrderIndependent) {
    auto joint = product(product(prior, q11), q12);
    auto a = marginalize(marginalize(joint, "Q11"), "F");
    auto b = marginalize(marginalize(joint, "F"), "Q11");
    expect_values_near(a, b.values(), 1e-15);
    EXPECT_THROW(marginalize(a, "Q11"), ModelError);
}

TEST_F(FactorTest, ReduceSlicesWithoutRenormalizing) {
    auto joint = product(prior, q11);
    auto r = reduce(joint, net.variable("Q11"), "2");
    EXPECT_EQ(r.names(), (std::vector<std::string>{"F"}));
    expect_values_near(r, {0.30 * 0.5, 0.03 * 0.5}, 1e-16);
    auto post = normalize(r);
    expect_values_near(post, {10.0 / 11.0, 1.0 / 11.0}, 1e-15);
    EXPECT_THROW(reduce(joint, net.variable("Q11"), "7"), ModelError);
    EXPECT_THROW(reduce(prior, net.variable("Q11"), "1"), ModelError);
}

TEST_F(FactorTest, EvidenceOnBothQuestions) {
    auto f = reduce(reduce(product(product(prior, q11), q12), net.variable("Q11"), "2"), net.variable("Q12"), "3");
    expect_values_near(normalize(f), {10.0 / 11.0, 1.0 / 11.0}, 1e-15);
}

TEST_F(FactorTest, ZeroSliceThenNormalizeFails) {
    Factor f({{"A", 2}, {"B", 2}}, {0.0, 0.4, 0.0, 0.6});
    auto slice = reduce(f, "B", 0);
    EXPECT_EQ(slice.values(), (std::vector<double>{0.0, 0.0}));
    EXPECT_THROW(normalize(slice), ImpossibleEvidence);
}

TEST_F(FactorTest, NormalizeIsIdempotentOnDistributions) {
    Factor d({{"A", 3}}, {0.2, 0.3, 0.5});
    expect_values_near(normalize(d), d.values(), 1e-12);
}

TEST(FactorConstruction, ValidatesShape) {
    EXPECT_THROW(Factor({{"A", 2}}, {1.0}), ModelError);
    EXPECT_THROW(Factor({{"A", 2}, {"A", 2}}, {1, 1, 1, 1}), ModelError);
    EXPECT_THROW(Factor({{"A", 2}}, {1.0, -0.5}), ModelError);
    EXPECT_EQ(Factor::scalar(2.5).values(), (std::vector<double>{2.5}));
}

// Random-factor generator over a fixed pool of variables.
struct RandomFactors {
    std::mt19937_64 rng;
    std::vector<ScopeEntry> pool{{"A", 2}, {"B", 3}, {"C", 4}, {"D", 2}, {"E", 5}};

    explicit RandomFactors(std::uint64_t seed) : rng(seed) {}

    Factor next(std::size_t max_vars = 3) {
        std::vector<ScopeEntry> shuffled = pool;
        std::shuffle(shuffled.begin(), shuffled.end(), rng);
        std::size_t k = std::uniform_int_distribution<std::size_t>(0, max_vars)(rng);
        std::vector<ScopeEntry> scope(shuffled.begin(), shuffled.begin() + static_cast<std::ptrdiff_t>(k));
        std::size_t n = 1;
        for (const auto& e : scope) n *= e.cardinality;
        std::uniform_real_distribution<double> unit(0.0, 2.0);
        std::vector<double> values(n);
        for (auto& v : values) v = unit(rng);
        return Factor(std::move(scope), std::move(values));
    }
};

double max_rel_diff(const Factor& a, const Factor& b) {
    double worst = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double scale = std::max({std::abs(a.values()[i]), std::abs(b.values()[i]), 1e-300});
        worst = std::max(worst, std::abs(a.values()[i] - b.values()[i]) / scale);
    }
    return worst;
}

TEST(FactorProperties, ProductCommutesAndAssociates) {
    RandomFactors gen(7);
    for (int i = 0; i < 200; ++i) {
        auto a = gen.next(), b = gen.next(), c = gen.next();
        auto ab = product(a, b);
        EXPECT_LE(max_rel_diff(ab, permute(product(b, a), ab.names())), 1e-12);
        auto left = product(product(a, b), c);
        auto right = permute(product(a, product(b, c)), left.names());
        EXPECT_LE(max_rel_diff(left, right), 1e-12);
    }
}

TEST(FactorProperties, MarginalizePreservesMass) {
    RandomFactors gen(11);
    for (int i = 0; i < 200; ++i) {
        auto f = gen.next(4);
        if (f.scope().empty()) continue;
        const auto& var = f.scope()[i % f.scope().size()].name;
        const double before = f.total();
        EXPECT_LE(std::abs(marginalize(f, var).total() - before), 1e-12 * std::max(1.0, before));
    }
}

TEST(FactorProperties, ReduceCommutesWithProduct) {
    RandomFactors gen(13);
    int checked = 0;
    for (int i = 0; i < 400 && checked < 200; ++i) {
        auto a = gen.next(), b = gen.next();
        for (const auto& e : a.scope()) {
            if (b.has(e.name)) continue;
            const std::size_t s = static_cast<std::size_t>(i) % e.cardinality;
            auto lhs = reduce(product(a, b), e.name, s);
            auto rhs = permute(product(reduce(a, e.name, s), b), lhs.names());
            EXPECT_LE(max_rel_diff(lhs, rhs), 1e-12);
            ++checked;
            break;
        }
    }
    EXPECT_EQ(checked, 200);
}

TEST(FactorProperties, CptChildSumsToOnes) {
    std::mt19937_64 rng(17);
    for (int i = 0; i < 100; ++i) {
        auto net = testing::random_network(rng);
        for (const auto& cpt : net.cpts()) {
            auto ones = marginalize(factor_from_cpt(cpt, net), cpt.child);
            for (double v : ones.values()) EXPECT_NEAR(v, 1.0, 1e-9);
        }
    }
}

TEST(FactorPermute, RoundTrips) {
    RandomFactors gen(19);
    for (int i = 0; i < 50; ++i) {
        auto f = gen.next(4);
        auto names = f.names();
        std::reverse(names.begin(), names.end());
        EXPECT_EQ(permute(permute(f, names), f.names()), f);
    }
}

}  // namespace
}  // namespace bnet

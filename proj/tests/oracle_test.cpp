#include <random>

#include <gtest/gtest.h>

#include "corpus.hpp"

using namespace cbtree;
using oracle::FiniteTree;

namespace {

SetDescription sd(const char* text) { return parse_description(text); }

bool subset(const FiniteTree& a, const FiniteTree& b) {
    for (const auto& w : a.nodes) {
        if (!b.contains(w)) return false;
    }
    return true;
}

} // namespace

TEST(Truncate, Examples) {
    EXPECT_EQ(oracle::truncate(TreeAutomaton::full(), 2).nodes.size(), 7u);
    EXPECT_TRUE(oracle::truncate(TreeAutomaton(), 5).empty());
}

TEST(Truncate, EScaleAgreesWithIntervalScan) {
    // All 31 words of length ≤ 4, checked one by one from the description.
    FiniteTree f = oracle::truncate(build(SetDescription::escale()), 4);
    std::size_t scanned = 0;
    for (std::size_t n = 0; n <= 4; ++n) {
        for (const auto& w : support::all_words(n)) {
            ++scanned;
            EXPECT_EQ(f.contains(w), oracle::brute_member(SetDescription::escale(), word_to_interval(w))) << w;
        }
    }
    EXPECT_EQ(scanned, 31u);
    EXPECT_TRUE(f.contains(BinaryWord("0001")));
    EXPECT_FALSE(f.contains(BinaryWord("1")));
}

TEST(BruteDerivative, Examples) {
    FiniteTree full = oracle::truncate(TreeAutomaton::full(), 4);
    EXPECT_EQ(oracle::brute_derivative(full), full);
    EXPECT_TRUE(oracle::brute_derivative(oracle::truncate(build(sd("(point 0)")), 4)).empty());
}

TEST(BruteDerivative, ZeroAndPowersInSafeBand) {
    TreeAutomaton t = build(sd("(intersect (avoid 10) (interval 0 1/2^1))"));
    FiniteTree g = oracle::brute_derivative(oracle::truncate(t, 12));
    FiniteTree band = oracle::restrict_depth(g, 8);
    // Only the 0-branch remains in the band.
    FiniteTree zero{8, {}};
    for (std::size_t n = 0; n <= 8; ++n) zero.nodes.insert(BinaryWord(std::string(n, '0')));
    EXPECT_EQ(band, zero);
    // Below the band, near-boundary artifacts survive.
    EXPECT_GT(g.nodes.size(), 13u);
}

TEST(BruteDerivative, MonotoneAndStableOnFixpoints) {
    for (const auto& e : support::corpus()) {
        FiniteTree f = oracle::truncate(e.tree, 10);
        FiniteTree g = oracle::brute_derivative(f);
        EXPECT_TRUE(subset(g, f)) << e.name;
        if (g == f) {
            EXPECT_EQ(oracle::brute_derivative(g), g) << e.name;
        }
    }
    // Monotone in its argument: a subtree derives to a subtree.
    FiniteTree small = oracle::truncate(build(sd("(interval 0 1/2^2)")), 10);
    FiniteTree big = oracle::truncate(build(sd("(interval 0 1/2^1)")), 10);
    ASSERT_TRUE(subset(small, big));
    EXPECT_TRUE(subset(oracle::brute_derivative(small), oracle::brute_derivative(big)));
}

TEST(BruteMember, Examples) {
    std::mt19937_64 rng(7);
    for (int i = 0; i < 100; ++i) {
        std::size_t n = rng() % 20;
        DyadicInterval iv(n, Integer(rng() % (std::uint64_t(1) << n)));
        EXPECT_TRUE(oracle::brute_member(sd("(full)"), iv));
    }
    EXPECT_TRUE(oracle::brute_member(sd("(point 1/2^1)"), DyadicInterval(2, 1)));
    EXPECT_FALSE(oracle::brute_member(sd("(point 1/2^1)"), DyadicInterval(2, 0)));
    // 5/16 ≤ 1/3 ≤ 6/16 by exact comparison.
    ASSERT_TRUE(Rational(5, 16) <= Rational(1, 3) && Rational(1, 3) <= Rational(6, 16));
    EXPECT_TRUE(oracle::brute_member(sd("(rational 1 3)"), DyadicInterval(4, 5)));
    EXPECT_FALSE(oracle::brute_member(sd("(rational 1 3)"), DyadicInterval(4, 6)));
}

TEST(BruteMember, AvoidAtDyadicEndpoints) {
    auto d = sd("(avoid 11)");
    // [3/4, 1]: 3/4 = 0.11 = 0.1011..., both contain 11.
    EXPECT_FALSE(oracle::brute_member(d, DyadicInterval(2, 3)));
    // [1/4, 1/2] holds 1/3 = 0.0101...
    EXPECT_TRUE(oracle::brute_member(d, DyadicInterval(2, 1)));
    // 1/2 = 0.1000... avoids 11, so a node touching 1/2 from the left survives.
    EXPECT_TRUE(oracle::brute_member(d, DyadicInterval(3, 3)));
}

TEST(BruteMember, RejectsTwoWordLevelOperands) {
    EXPECT_THROW(oracle::brute_member(sd("(intersect (avoid 11) (escale))"), DyadicInterval(1, 0)),
                 MalformedDescription);
}

TEST(BandMargin, CorpusSplitsAreNeverFurtherThanTheMargin) {
    for (const auto& e : support::corpus()) {
        std::vector<char> live = reaches_split(e.tree);
        for (State q = 0; q < e.tree.size(); ++q) {
            if (!live[q]) continue;
            auto w = shortest_word_to_split(e.tree, q);
            ASSERT_TRUE(w);
            EXPECT_LE(w->size(), oracle::kBandMargin) << e.name << " " << state_name(q);
        }
    }
}

TEST(SafeBand, PruneAgreesWithBruteDerivativeOnCorpus) {
    for (const auto& e : support::corpus()) {
        EXPECT_TRUE(oracle::safe_band_agrees(e.tree, prune_once(e.tree), 12)) << e.name;
    }
}

TEST(BruteKernel, AgreesWithVerdictOnCorpus) {
    for (const auto& e : support::corpus()) {
        auto b = oracle::brute_kernel(oracle::brute_truncate(e.description, 12));
        ASSERT_TRUE(b) << e.name;
        EXPECT_EQ(b->empty, classify(e.tree).countable()) << e.name;
    }
}

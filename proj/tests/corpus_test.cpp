#include <gtest/gtest.h>

#include "corpus.hpp"

using namespace cbtree;

TEST(Corpus, HasEnoughEntriesOfEveryKind) {
    const auto& c = support::corpus();
    EXPECT_GE(c.size(), 30u);
    std::size_t countable = 0, continuum = 0;
    for (const auto& e : c) (classify(e.tree).countable() ? countable : continuum)++;
    EXPECT_GE(countable, 10u);
    EXPECT_GE(continuum, 10u);
}

TEST(Corpus, BranchSetMatchesIntervalOracleToDepthFourteen) {
    for (const auto& e : support::corpus()) {
        EXPECT_EQ(oracle::truncate(e.tree, 14), oracle::brute_truncate(e.description, 14)) << e.name;
    }
}

TEST(Corpus, NodeMembershipMatchesOracleOnAllWords) {
    for (const auto& e : support::corpus()) {
        for (std::size_t n = 0; n <= 12; ++n) {
            for (const auto& w : support::all_words(n)) {
                ASSERT_EQ(member_node(e.tree, w), oracle::brute_member(e.description, word_to_interval(w)))
                    << e.name << " " << w;
            }
        }
    }
}

TEST(Corpus, FrozenVerdicts) {
    // Ranks checked against the brute-force derivative on depth-12 truncations
    // (oracle test BruteKernel.AgreesWithVerdictOnCorpus covers emptiness).
    const std::map<std::string, std::string> expected{
        {"full", "verdict=continuum rank=0 kernel_states=1"},
        {"empty", "verdict=countable rank=0 branches=0"},
        {"point0", "verdict=countable rank=1 branches=1"},
        {"point_half", "verdict=countable rank=1 branches=2"},
        {"zero_powers", "verdict=countable rank=2 branches=26"},
        {"omega_closure", "verdict=countable rank=2 branches=26"},
        {"avoid11", "verdict=continuum rank=1 kernel_states=2"},
        {"escale", "verdict=continuum rank=1 kernel_states=2"},
        {"rational_third", "verdict=countable rank=1 branches=1"},
    };
    for (const auto& e : support::corpus()) {
        auto it = expected.find(e.name);
        if (it != expected.end()) {
            EXPECT_EQ(classify(e.tree).to_string(), it->second) << e.name;
        }
    }
}

TEST(Corpus, BruteRanksMatch) {
    for (const auto& e : support::corpus()) {
        auto b = oracle::brute_kernel(oracle::brute_truncate(e.description, 12));
        ASSERT_TRUE(b);
        EXPECT_EQ(b->rank, perfect_kernel(e.tree).rank) << e.name;
    }
}

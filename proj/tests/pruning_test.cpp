#include <gtest/gtest.h>

#include "corpus.hpp"

using namespace cbtree;

namespace {

TreeAutomaton parsed(const char* text) { return build(parse_description(text)); }

bool branch_set_subset(const TreeAutomaton& small, const TreeAutomaton& big, std::size_t depth) {
    for (const auto& w : words_at_depth(small, depth)) {
        if (!member_node(big, w)) return false;
    }
    return true;
}

} // namespace

TEST(PruneOnce, Examples) {
    TreeAutomaton full = parsed("(full)");
    EXPECT_EQ(prune_once(full), full);
    EXPECT_TRUE(prune_once(parsed("(point 0)")).empty());
}

TEST(PruneOnce, IsolatedPointAndEndpointTailsGo) {
    TreeAutomaton t = parsed("(union (interval 0 1/2^1) (point 3/2^2))");
    TreeAutomaton p = prune_once(t);
    // The 3/4 branches stop splitting below depth 2.
    for (const auto& w : words_at_depth(p, 10)) EXPECT_EQ(w[0], 0) << w;
    EXPECT_FALSE(member_node(p, BinaryWord("11")));
    // The other expansion 1000... of 1/2 is isolated too; what is left is
    // exactly the perfect part of [0, 1/2].
    EXPECT_FALSE(member_node(p, BinaryWord("1")));
    EXPECT_EQ(p, perfect_kernel(parsed("(interval 0 1/2^1)")).kernel);
    EXPECT_EQ(words_at_depth(p, 10).size(), std::size_t(1) << 9);
}

TEST(PerfectKernel, Examples) {
    auto full = perfect_kernel(parsed("(full)"));
    EXPECT_EQ(full.kernel, parsed("(full)"));
    EXPECT_EQ(full.rank, 0u);
    auto point = perfect_kernel(parsed("(point 0)"));
    EXPECT_TRUE(point.kernel.empty());
    EXPECT_EQ(point.rank, 1u);
}

TEST(PerfectKernel, ZeroAndPowersHaveRankTwo) {
    TreeAutomaton t = parsed("(intersect (avoid 10) (interval 0 1/2^1))");
    TreeAutomaton once = prune_once(t);
    // After one step only the branch 000... survives.
    EXPECT_EQ(once, parsed("(point 0)"));
    auto k = perfect_kernel(t);
    EXPECT_TRUE(k.kernel.empty());
    EXPECT_EQ(k.rank, 2u);
    auto brute = oracle::brute_kernel(oracle::brute_truncate(parse_description("(intersect (avoid 10) (interval 0 1/2^1))"), 12));
    ASSERT_TRUE(brute);
    EXPECT_TRUE(brute->empty);
    EXPECT_EQ(brute->rank, 2u);
}

TEST(PerfectKernel, CorpusInvariants) {
    for (const auto& e : support::corpus()) {
        auto kr = perfect_kernel(e.tree);
        EXPECT_LE(kr.rank, e.tree.size()) << e.name;
        EXPECT_EQ(prune_once(kr.kernel), kr.kernel) << e.name;
        EXPECT_EQ(perfect_kernel(kr.kernel).rank, 0u) << e.name;
        // Perfectness: every kernel state reaches a split within size() steps.
        for (State q = 0; q < kr.kernel.size(); ++q) {
            auto w = shortest_word_to_split(kr.kernel, q);
            ASSERT_TRUE(w) << e.name;
            EXPECT_LE(w->size(), kr.kernel.size()) << e.name;
        }
        // Each stage shrinks every cross-section.
        TreeAutomaton current = e.tree;
        for (std::size_t s = 0; s < kr.rank; ++s) {
            TreeAutomaton next = prune_once(current);
            EXPECT_TRUE(branch_set_subset(next, current, 12)) << e.name;
            current = next;
        }
    }
}

TEST(Classify, Examples) {
    EXPECT_FALSE(classify(parsed("(avoid 11)")).countable());
    auto half = classify(parsed("(point 1/2^1)"));
    EXPECT_TRUE(half.countable());
    EXPECT_EQ(half.rank(), 1u);
    auto c = classify(parsed("(union (point 0) (union (point 1/2^1) (interval 3/2^2 1)))"));
    ASSERT_FALSE(c.countable());
    TreeAutomaton kernel = std::get<Continuum>(c.verdict).kernel;
    EXPECT_EQ(kernel, perfect_kernel(parsed("(interval 3/2^2 1)")).kernel);
    // Cross-section of the kernel at depth 10: the nodes inside [3/4, 1].
    for (const auto& w : support::all_words(10)) {
        EXPECT_EQ(member_node(kernel, w), w.starts_with(BinaryWord("11"))) << w;
    }
    EXPECT_EQ(c.to_string(), "verdict=continuum rank=1 kernel_states=3");
}

TEST(Classify, AvoidElevenKernelSplitsWithinTwoLevels) {
    TreeAutomaton k = perfect_kernel(parsed("(avoid 11)")).kernel;
    ASSERT_EQ(k.size(), 2u);
    KernelWitness w = kernel_witness(k);
    for (const auto& s : w.split_schedule) EXPECT_LE(s.size(), 1u);
    // Exhaustively on every depth-8 node: a split within two levels below.
    for (const auto& word : words_at_depth(k, 8)) {
        bool split = false;
        for (const auto& ext : {BinaryWord(""), BinaryWord("0"), BinaryWord("1")}) {
            State q = k.walk(word + ext);
            if (q != kNoState && k.is_split(q)) split = true;
        }
        EXPECT_TRUE(split) << word;
    }
}

TEST(KernelWitness, EmptyKernelThrows) {
    EXPECT_THROW(kernel_witness(TreeAutomaton()), EmptyKernel);
    EXPECT_THROW(kernel_witness(parsed("(point 0)")), EmptyKernel);
}

TEST(PrunedBranches, Examples) {
    EXPECT_TRUE(pruned_branches(parsed("(full)"), 14).empty());
    auto zero = pruned_branches(parsed("(point 0)"), 0);
    ASSERT_EQ(zero.size(), 1u);
    EXPECT_EQ(zero[0].cut_node, BinaryWord());
    EXPECT_EQ(zero[0].tail.period, BinaryWord("0"));
    EXPECT_EQ(zero[0].stage, 1u);
}

TEST(PrunedBranches, ZeroAndPowersAgainstTruncation) {
    auto d = parse_description("(intersect (avoid 10) (interval 0 1/2^1))");
    TreeAutomaton t = build(d);
    auto branches = pruned_branches(t, 6);
    // Brute force on the depth-12 truncation: a stage-1 cut node is a node
    // whose subtree has no split above depth 12 while its parent splits.
    oracle::FiniteTree f = oracle::brute_truncate(d, 12);
    auto splits_below = [&](const BinaryWord& w) {
        for (const auto& v : f.nodes) {
            if (v.size() < 12 && v.starts_with(w) && f.is_split(v)) return true;
        }
        return false;
    };
    std::set<BinaryWord> expected;
    for (const auto& w : f.nodes) {
        if (w.size() > 6 || w.empty()) continue;
        BinaryWord parent = w.prefix(w.size() - 1);
        if (!splits_below(w) && f.is_split(parent)) expected.insert(w);
    }
    std::set<BinaryWord> stage1, stage2;
    for (const auto& b : branches) (b.stage == 1 ? stage1 : stage2).insert(b.cut_node);
    EXPECT_EQ(stage1, expected);
    EXPECT_EQ(stage2, (std::set<BinaryWord>{BinaryWord()}));
    for (const auto& b : branches) {
        if (b.stage == 2) {
            EXPECT_EQ(b.tail, (Expansion{BinaryWord(), BinaryWord("0")}));
        }
    }
    // Every stage-1 branch is one of the isolated points 2^-n.
    EXPECT_TRUE(stage1.count(BinaryWord("1")));
    for (const auto& b : branches) {
        if (b.stage != 1) continue;
        Rational x = Expansion{b.cut_node + b.tail.preperiod, b.tail.period}.value();
        auto pt = DyadicRational::from_rational(x);
        ASSERT_TRUE(pt) << b.cut_node;
        EXPECT_EQ(pt->numerator(), 1) << b.cut_node;
        EXPECT_GE(pt->exponent(), 1u) << b.cut_node;
    }
}

TEST(PrunedBranches, CutNodesDistinctAndCoverCountableSets) {
    for (const auto& e : support::corpus()) {
        auto branches = pruned_branches(e.tree, 14);
        std::set<BinaryWord> cuts;
        for (const auto& b : branches) EXPECT_TRUE(cuts.insert(b.cut_node).second) << e.name << " " << b.cut_node;
        if (!classify(e.tree).countable()) continue;
        auto gap = first_uncovered_node(e.tree, branches, 14);
        EXPECT_FALSE(gap) << e.name << " " << *gap;
    }
}

TEST(PrunedBranches, SplitsAtTheBudgetDepthAreCoveredByPoints) {
    // 0^13 1 = [2^-14, 2^-13] holds two points and splits, so its own
    // branches are cut at depth 15; the point 2^-13 is cut at depth 14.
    TreeAutomaton t = parsed("(intersect (avoid 10) (interval 0 1/2^1))");
    BinaryWord w(std::string(13, '0') + "1");
    ASSERT_TRUE(t.is_split(t.walk(w)));
    auto branches = pruned_branches(t, 14);
    for (const auto& b : branches) EXPECT_NE(b.prefix(14), w);
    EXPECT_FALSE(first_uncovered_node(t, branches, 14));
    EXPECT_TRUE(std::any_of(branches.begin(), branches.end(),
                            [](const PrunedBranch& b) { return b.point() == Rational(1, 8192); }));
}

TEST(KernelInjection, Examples) {
    TreeAutomaton full = parsed("(full)");
    EXPECT_EQ(kernel_injection(full, BinaryWord("")), DyadicInterval(0, 0));
    EXPECT_EQ(kernel_injection(full, BinaryWord("10")), DyadicInterval(2, 2));
    TreeAutomaton a = perfect_kernel(parsed("(avoid 11)")).kernel;
    EXPECT_EQ(kernel_injection_path(a, BinaryWord("11")), BinaryWord("1010"));
    EXPECT_EQ(kernel_injection(a, BinaryWord("11")), DyadicInterval(4, 10));
    EXPECT_THROW(kernel_injection(TreeAutomaton(), BinaryWord("1")), EmptyKernel);
}

TEST(CantorSurjection, Examples) {
    EXPECT_EQ(cantor_surjection(parsed("(full)"), BinaryWord("0110")), BinaryWord("0110"));
    TreeAutomaton a = perfect_kernel(parsed("(avoid 11)")).kernel;
    EXPECT_EQ(cantor_surjection(a, BinaryWord("1010")), BinaryWord("11"));
    EXPECT_EQ(cantor_surjection(a, BinaryWord("")), BinaryWord(""));
    EXPECT_THROW(cantor_surjection(a, BinaryWord("11")), NotAPath);
}

TEST(CantorSurjection, InvertsInjectionOnCorpusKernels) {
    for (const auto& e : support::corpus()) {
        TreeAutomaton k = perfect_kernel(e.tree).kernel;
        if (k.empty()) continue;
        for (std::size_t n = 0; n <= 8; ++n) {
            for (const auto& w : support::all_words(n)) {
                EXPECT_EQ(cantor_surjection(k, kernel_injection_path(k, w)), w) << e.name;
            }
        }
    }
}

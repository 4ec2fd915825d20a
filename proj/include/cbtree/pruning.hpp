#pragma once

#include <algorithm>
#include <deque>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "cbtree/dyadic.hpp"
#include "cbtree/error.hpp"
#include "cbtree/treeset.hpp"

namespace cbtree {

/// States from which a two-child state is reachable (the state itself included).
inline std::vector<char> reaches_split(const TreeAutomaton& t) {
    const std::size_t n = t.size();
    std::vector<std::vector<State>> parents(n);
    std::deque<State> queue;
    std::vector<char> mark(n, 0);
    for (State q = 0; q < n; ++q) {
        for (int b = 0; b < 2; ++b) {
            if (t.has_child(q, b)) parents[t.child(q, b)].push_back(q);
        }
        if (t.is_split(q)) {
            mark[q] = 1;
            queue.push_back(q);
        }
    }
    while (!queue.empty()) {
        State q = queue.front();
        queue.pop_front();
        for (State p : parents[q]) {
            if (!mark[p]) {
                mark[p] = 1;
                queue.push_back(p);
            }
        }
    }
    return mark;
}

/// One derivative step: every branch that stops splitting is cut at the node
/// after its last split. On a finite presentation this keeps the states that
/// can still reach a split and trims whatever dies as a consequence.
inline TreeAutomaton prune_once(const TreeAutomaton& t) {
    if (t.empty()) return t;
    std::vector<char> keep = reaches_split(t);
    TreeAutomaton::Transitions table = t.transitions();
    for (State q = 0; q < table.size(); ++q) {
        for (auto& c : table[q]) {
            if (c != kNoState && (!keep[q] || !keep[c])) c = kNoState;
        }
    }
    if (!keep[t.root()]) return {};
    return TreeAutomaton::from_transitions(table, t.root());
}

struct KernelResult {
    TreeAutomaton kernel;
    std::size_t rank = 0;
};

/// Iterates prune_once to its fixpoint. Every productive step removes at least
/// one state, so the loop runs at most size() times.
inline KernelResult perfect_kernel(const TreeAutomaton& t) {
    KernelResult out{t, 0};
    for (;;) {
        TreeAutomaton next = prune_once(out.kernel);
        if (next == out.kernel) return out;
        out.kernel = std::move(next);
        ++out.rank;
    }
}

/// For each kernel state, a shortest word leading (inside the kernel) to a
/// two-child state. Empty for states that split themselves.
struct KernelWitness {
    std::vector<BinaryWord> split_schedule;
};

inline std::optional<BinaryWord> shortest_word_to_split(const TreeAutomaton& t, State from) {
    std::vector<char> seen(t.size(), 0);
    std::deque<std::pair<State, BinaryWord>> queue{{from, BinaryWord()}};
    seen[from] = 1;
    while (!queue.empty()) {
        auto [q, w] = queue.front();
        queue.pop_front();
        if (t.is_split(q)) return w;
        for (int b = 0; b < 2; ++b) {
            State c = t.child(q, b);
            if (c != kNoState && !seen[c]) {
                seen[c] = 1;
                queue.emplace_back(c, w.child(b));
            }
        }
    }
    return std::nullopt;
}

/// Throws EmptyKernel when some state can no longer split.
inline KernelWitness kernel_witness(const TreeAutomaton& kernel) {
    if (kernel.empty()) throw EmptyKernel("kernel", "no states");
    KernelWitness out;
    for (State q = 0; q < kernel.size(); ++q) {
        auto w = shortest_word_to_split(kernel, q);
        if (!w) throw EmptyKernel(state_name(q), "state never splits");
        out.split_schedule.push_back(*w);
    }
    return out;
}

/// A branch removed by pruning: cut at `cut_node`, below which it continues
/// as the (unique, eventually periodic) word `tail`.
struct PrunedBranch {
    BinaryWord cut_node;
    Expansion tail;
    std::size_t stage = 1;

    /// First n digits of the full branch.
    BinaryWord prefix(std::size_t n) const {
        if (n <= cut_node.size()) return cut_node.prefix(n);
        return cut_node + tail.digits(n - cut_node.size());
    }

    /// The point of [0,1] this branch expands.
    Rational point() const { return Expansion{cut_node + tail.preperiod, tail.period}.value(); }

    friend bool operator==(const PrunedBranch&, const PrunedBranch&) = default;
};

/// The single branch below a non-splitting state, as preperiod and period.
inline Expansion forced_tail(const TreeAutomaton& t, State q) {
    std::map<State, std::size_t> first_seen;
    BinaryWord word;
    while (first_seen.emplace(q, word.size()).second) {
        int b = t.has_child(q, 0) ? 0 : 1;
        word.push_back(b);
        q = t.child(q, b);
    }
    std::size_t start = first_seen[q];
    Expansion e;
    e.preperiod = word.prefix(start);
    e.period = BinaryWord(word.str().substr(start));
    return e;
}

/// Cut nodes of one stage: nodes whose subtree is a single branch while their
/// parent still splits (or the root, when the whole tree is one branch).
inline void collect_cut_nodes(const TreeAutomaton& t, std::size_t budget, std::size_t stage,
                              std::vector<PrunedBranch>& out) {
    if (t.empty()) return;
    std::vector<char> live = reaches_split(t);
    std::vector<std::pair<BinaryWord, State>> layer{{BinaryWord(), t.root()}};
    for (std::size_t depth = 0; depth <= budget && !layer.empty(); ++depth) {
        std::vector<std::pair<BinaryWord, State>> next;
        for (const auto& [w, q] : layer) {
            if (!live[q]) {
                out.push_back({w, forced_tail(t, q), stage});
                continue;
            }
            for (int b = 0; b < 2; ++b) {
                if (t.has_child(q, b)) next.emplace_back(w.child(b), t.child(q, b));
            }
        }
        layer.swap(next);
    }
}

/// All pruned branches with cut nodes of length ≤ budget, over every stage
/// until the fixpoint. Cut nodes are pairwise distinct: a cut subtree is
/// gone from all later stages.
inline std::vector<PrunedBranch> pruned_branches(const TreeAutomaton& t, std::size_t budget) {
    std::vector<PrunedBranch> out;
    TreeAutomaton current = t;
    for (std::size_t stage = 1;; ++stage) {
        TreeAutomaton next = prune_once(current);
        if (next == current) break;
        collect_cut_nodes(current, budget, stage, out);
        current = std::move(next);
    }
    return out;
}

struct Countable {
    std::size_t rank = 0;
    std::vector<PrunedBranch> branches;
};

struct Continuum {
    TreeAutomaton kernel;
    std::size_t rank = 0;
    std::vector<PrunedBranch> pruned;
};

/// Does every node of length `depth` contain the point of some pruned branch?
/// In the countable case the points of all branches make up M, and a node
/// exists exactly when its closed interval meets M.
inline std::optional<BinaryWord> first_uncovered_node(const TreeAutomaton& t, const std::vector<PrunedBranch>& branches,
                                                      std::size_t depth) {
    std::vector<Rational> points;
    for (const auto& b : branches) points.push_back(b.point());
    std::sort(points.begin(), points.end());
    for (const auto& w : words_at_depth(t, depth)) {
        DyadicInterval iv = word_to_interval(w);
        auto it = std::lower_bound(points.begin(), points.end(), iv.lo_rational());
        if (it == points.end() || *it > iv.hi_rational()) return w;
    }
    return std::nullopt;
}

/// Countable iff pruning ends in the empty system.
struct Classification {
    std::variant<Countable, Continuum> verdict;

    bool countable() const { return std::holds_alternative<Countable>(verdict); }
    std::size_t rank() const {
        return std::visit([](const auto& v) { return v.rank; }, verdict);
    }
    const std::vector<PrunedBranch>& branches() const {
        if (auto* c = std::get_if<Countable>(&verdict)) return c->branches;
        return std::get<Continuum>(verdict).pruned;
    }

    std::string to_string() const {
        if (auto* c = std::get_if<Countable>(&verdict)) {
            return "verdict=countable rank=" + std::to_string(c->rank) +
                   " branches=" + std::to_string(c->branches.size());
        }
        const auto& k = std::get<Continuum>(verdict);
        return "verdict=continuum rank=" + std::to_string(k.rank) + " kernel_states=" + std::to_string(k.kernel.size());
    }
};

inline constexpr std::size_t kDefaultBranchBudget = 14;

inline Classification classify(const TreeAutomaton& t, std::size_t budget = kDefaultBranchBudget) {
    KernelResult kr = perfect_kernel(t);
    std::vector<PrunedBranch> pruned = pruned_branches(t, budget);
    if (kr.kernel.empty()) return {Countable{kr.rank, std::move(pruned)}};
    return {Continuum{std::move(kr.kernel), kr.rank, std::move(pruned)}};
}

/// Path through a perfect kernel chosen by `choices`: one choice is consumed
/// at every split, forced children are followed elsewhere, and the walk stops
/// at the next split once the choices run out.
inline BinaryWord kernel_injection_path(const TreeAutomaton& kernel, const BinaryWord& choices) {
    if (kernel.empty()) throw EmptyKernel("kernel", "no states");
    BinaryWord path;
    State q = kernel.root();
    std::size_t used = 0;
    std::size_t forced = 0;
    for (;;) {
        if (kernel.is_split(q)) {
            if (used == choices.size()) return path;
            int b = choices[used++];
            path.push_back(b);
            q = kernel.child(q, b);
            forced = 0;
        } else {
            if (++forced > kernel.size()) throw EmptyKernel(path.str(), "state never splits");
            int b = kernel.has_child(q, 0) ? 0 : 1;
            path.push_back(b);
            q = kernel.child(q, b);
        }
    }
}

inline DyadicInterval kernel_injection(const TreeAutomaton& kernel, const BinaryWord& choices) {
    return word_to_interval(kernel_injection_path(kernel, choices));
}

/// The choices made at split states along `path`; left inverse of
/// kernel_injection_path.
inline BinaryWord cantor_surjection(const TreeAutomaton& kernel, const BinaryWord& path) {
    if (kernel.empty()) throw EmptyKernel("kernel", "no states");
    BinaryWord choices;
    State q = kernel.root();
    for (std::size_t i = 0; i < path.size(); ++i) {
        State c = kernel.child(q, path[i]);
        if (c == kNoState) throw NotAPath(path.str(), "leaves the kernel after " + path.prefix(i).str());
        if (kernel.is_split(q)) choices.push_back(path[i]);
        q = c;
    }
    return choices;
}

} // namespace cbtree

#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <deque>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "cbtree/description.hpp"
#include "cbtree/dyadic.hpp"

namespace cbtree {

using State = std::uint32_t;
inline constexpr State kNoState = std::numeric_limits<State>::max();

/// Finite presentation of an infinite binary branching system. A node (word)
/// exists iff following it from the root stays inside the automaton; the
/// infinite branches are the binary expansions of the points of a closed set.
///
/// Values are always canonical: trimmed (every state has a child and is
/// reachable), minimized, and numbered breadth-first from the root with child
/// 0 before child 1. Equal branch languages therefore compare equal. The empty
/// set is the automaton with no states.
class TreeAutomaton {
public:
    using Transitions = std::vector<std::array<State, 2>>;

    TreeAutomaton() = default;

    /// Canonicalizes an arbitrary partial transition table rooted at `root`.
    static TreeAutomaton from_transitions(const Transitions& children, State root);

    static TreeAutomaton full() { return from_transitions({{0, 0}}, 0); }
    static TreeAutomaton empty_set() { return {}; }

    bool empty() const noexcept { return children_.empty(); }
    std::size_t size() const noexcept { return children_.size(); }
    State root() const noexcept { return empty() ? kNoState : 0; }

    State child(State q, int bit) const { return children_[q][bit]; }
    bool has_child(State q, int bit) const { return children_[q][bit] != kNoState; }
    int child_count(State q) const { return has_child(q, 0) + has_child(q, 1); }
    bool is_split(State q) const { return child_count(q) == 2; }

    /// State reached by following `w`, or kNoState.
    State walk(const BinaryWord& w) const {
        State q = root();
        for (std::size_t i = 0; i < w.size() && q != kNoState; ++i) q = children_[q][w[i]];
        return q;
    }

    const Transitions& transitions() const noexcept { return children_; }

    friend bool operator==(const TreeAutomaton&, const TreeAutomaton&) = default;

private:
    explicit TreeAutomaton(Transitions children) : children_(std::move(children)) {}

    Transitions children_;
};

inline TreeAutomaton TreeAutomaton::from_transitions(const Transitions& children, State root) {
    const std::size_t n = children.size();
    if (root == kNoState || root >= n) return {};

    // Keep only states with an infinite continuation: drop childless states until none remain.
    std::vector<char> alive(n, 1);
    for (bool changed = true; changed;) {
        changed = false;
        for (std::size_t q = 0; q < n; ++q) {
            if (!alive[q]) continue;
            bool has = false;
            for (State c : children[q]) has |= (c != kNoState && c < n && alive[c]);
            if (!has) {
                alive[q] = 0;
                changed = true;
            }
        }
    }
    if (!alive[root]) return {};
    auto edge = [&](std::size_t q, int b) -> State {
        State c = children[q][b];
        return (c != kNoState && c < n && alive[c]) ? c : kNoState;
    };

    // Moore partition refinement; the signature of a state is its class plus children's classes.
    std::vector<std::size_t> cls(n, 0);
    std::size_t classes = 0;
    {
        std::map<std::pair<bool, bool>, std::size_t> first;
        for (std::size_t q = 0; q < n; ++q) {
            if (!alive[q]) continue;
            auto key = std::pair{edge(q, 0) != kNoState, edge(q, 1) != kNoState};
            auto [it, fresh] = first.emplace(key, first.size());
            cls[q] = it->second;
        }
        classes = first.size();
    }
    for (;;) {
        std::map<std::array<std::size_t, 3>, std::size_t> sig;
        std::vector<std::size_t> next(n, 0);
        constexpr std::size_t none = std::numeric_limits<std::size_t>::max();
        for (std::size_t q = 0; q < n; ++q) {
            if (!alive[q]) continue;
            std::array<std::size_t, 3> key{cls[q], edge(q, 0) == kNoState ? none : cls[edge(q, 0)],
                                           edge(q, 1) == kNoState ? none : cls[edge(q, 1)]};
            auto [it, fresh] = sig.emplace(key, sig.size());
            next[q] = it->second;
        }
        cls.swap(next);
        if (sig.size() == classes) break;
        classes = sig.size();
    }

    // Breadth-first renumbering of the quotient from the root's class.
    std::vector<State> rep(classes, kNoState);
    for (std::size_t q = 0; q < n; ++q) {
        if (alive[q] && rep[cls[q]] == kNoState) rep[cls[q]] = static_cast<State>(q);
    }
    std::vector<State> number(classes, kNoState);
    std::deque<std::size_t> queue{cls[root]};
    number[cls[root]] = 0;
    Transitions out;
    out.push_back({kNoState, kNoState});
    while (!queue.empty()) {
        std::size_t c = queue.front();
        queue.pop_front();
        for (int b = 0; b < 2; ++b) {
            State target = edge(rep[c], b);
            if (target == kNoState) continue;
            std::size_t tc = cls[target];
            if (number[tc] == kNoState) {
                number[tc] = static_cast<State>(out.size());
                out.push_back({kNoState, kNoState});
                queue.push_back(tc);
            }
            out[number[c]][b] = number[tc];
        }
    }
    return TreeAutomaton(std::move(out));
}

/// Builds an automaton by exploring the finitely many subtree "shapes"
/// reachable from `start`. `expand(key)` returns the keys of the two
/// children, `std::nullopt` for a missing child.
template <class Key, class Expand>
TreeAutomaton explore(const Key& start, Expand expand) {
    std::map<Key, State> id;
    std::vector<Key> keys;
    TreeAutomaton::Transitions table;
    auto intern = [&](const Key& k) {
        auto [it, fresh] = id.emplace(k, static_cast<State>(keys.size()));
        if (fresh) {
            keys.push_back(k);
            table.push_back({kNoState, kNoState});
        }
        return it->second;
    };
    intern(start);
    for (std::size_t i = 0; i < keys.size(); ++i) {
        std::array<std::optional<Key>, 2> kids = expand(Key(keys[i]));
        for (int b = 0; b < 2; ++b) {
            if (kids[b]) {
                State c = intern(*kids[b]);
                table[i][b] = c;
            }
        }
    }
    return TreeAutomaton::from_transitions(table, 0);
}

inline bool member_node(const TreeAutomaton& t, const BinaryWord& w) { return t.walk(w) != kNoState; }

/// Cross-section of the branching system at one depth.
struct NodeSet {
    std::size_t depth = 0;
    std::vector<DyadicInterval> intervals;

    friend bool operator==(const NodeSet&, const NodeSet&) = default;
};

/// Accepted words of length n, in increasing (left to right) order.
inline std::vector<BinaryWord> words_at_depth(const TreeAutomaton& t, std::size_t n) {
    std::vector<std::pair<BinaryWord, State>> layer;
    if (!t.empty()) layer.emplace_back(BinaryWord(), t.root());
    for (std::size_t d = 0; d < n; ++d) {
        std::vector<std::pair<BinaryWord, State>> next;
        next.reserve(layer.size() * 2);
        for (const auto& [w, q] : layer) {
            for (int b = 0; b < 2; ++b) {
                if (t.has_child(q, b)) next.emplace_back(w.child(b), t.child(q, b));
            }
        }
        layer.swap(next);
    }
    std::vector<BinaryWord> out;
    out.reserve(layer.size());
    for (auto& [w, q] : layer) out.push_back(std::move(w));
    return out;
}

inline NodeSet nodes_at_depth(const TreeAutomaton& t, std::size_t n) {
    NodeSet out{n, {}};
    for (const auto& w : words_at_depth(t, n)) out.intervals.push_back(word_to_interval(w));
    return out;
}

/// Largest reachable subautomaton without dead ends. Automata are kept
/// canonical, so this only changes raw tables (hand-built or product tables).
inline TreeAutomaton trim(const TreeAutomaton::Transitions& table, State root = 0) {
    return TreeAutomaton::from_transitions(table, root);
}
inline TreeAutomaton trim(const TreeAutomaton& t) { return trim(t.transitions(), t.root()); }

namespace detail {

using PairKey = std::pair<State, State>;

inline std::array<std::optional<PairKey>, 2> product_children(const TreeAutomaton& a, const TreeAutomaton& b,
                                                              const PairKey& k, bool require_both) {
    std::array<std::optional<PairKey>, 2> out;
    for (int bit = 0; bit < 2; ++bit) {
        State ca = k.first == kNoState ? kNoState : a.child(k.first, bit);
        State cb = k.second == kNoState ? kNoState : b.child(k.second, bit);
        bool ok = require_both ? (ca != kNoState && cb != kNoState) : (ca != kNoState || cb != kNoState);
        if (ok) out[bit] = PairKey{ca, cb};
    }
    return out;
}

} // namespace detail

/// Untrimmed reachable product table, root 0. `require_both` selects
/// intersection semantics, otherwise absent sides are carried as kNoState.
inline TreeAutomaton::Transitions product_table(const TreeAutomaton& a, const TreeAutomaton& b, bool require_both) {
    TreeAutomaton::Transitions table;
    if (a.empty() && (require_both || b.empty())) return table;
    if (b.empty() && require_both) return table;
    std::map<detail::PairKey, State> id;
    std::vector<detail::PairKey> keys{{a.root(), b.root()}};
    id.emplace(keys.front(), 0);
    table.push_back({kNoState, kNoState});
    for (std::size_t i = 0; i < keys.size(); ++i) {
        auto kids = detail::product_children(a, b, detail::PairKey(keys[i]), require_both);
        for (int bit = 0; bit < 2; ++bit) {
            if (!kids[bit]) continue;
            auto [it, fresh] = id.emplace(*kids[bit], static_cast<State>(keys.size()));
            if (fresh) {
                keys.push_back(*kids[bit]);
                table.push_back({kNoState, kNoState});
            }
            table[i][bit] = it->second;
        }
    }
    return table;
}

/// Node-wise union of two branching systems (the tree of A ∪ B is the union of the trees).
inline TreeAutomaton unite(const TreeAutomaton& a, const TreeAutomaton& b) {
    if (a.empty()) return b;
    if (b.empty()) return a;
    return explore(detail::PairKey{a.root(), b.root()},
                   [&](const detail::PairKey& k) { return detail::product_children(a, b, k, false); });
}

/// Synchronous product, trimmed. A node survives only if some common branch
/// passes through it, which is exactly the branching system of A ∩ B.
inline TreeAutomaton intersect(const TreeAutomaton& a, const TreeAutomaton& b) {
    if (a.empty() || b.empty()) return {};
    return explore(detail::PairKey{a.root(), b.root()},
                   [&](const detail::PairKey& k) { return detail::product_children(a, b, k, true); });
}

/// True iff the ultimately periodic word `prefix · repeat^ω` is a branch from state q.
inline bool accepts_periodic(const TreeAutomaton& t, State q, const BinaryWord& prefix, const BinaryWord& repeat) {
    for (std::size_t i = 0; i < prefix.size() && q != kNoState; ++i) q = t.child(q, prefix[i]);
    if (q == kNoState) return false;
    std::set<State> seen;
    while (seen.insert(q).second) {
        for (std::size_t i = 0; i < repeat.size(); ++i) {
            q = t.child(q, repeat[i]);
            if (q == kNoState) return false;
        }
    }
    return true;
}

/// Converts a word automaton (its branches are digit sequences) into the
/// closed-interval branching system of the point set those digits denote: a
/// node exists iff its closed interval meets the set, so a dyadic point also
/// shows up through its other expansion in the neighbouring subtree.
///
/// A subtree is described by (word state, left endpoint present, right
/// endpoint present): the rescaled set is π(L_q) ∪ {0 if left} ∪ {1 if right}.
inline TreeAutomaton close_over_endpoints(const TreeAutomaton& words) {
    if (words.empty()) return {};
    using Key = std::tuple<State, bool, bool>;
    const BinaryWord zero("0"), one("1");
    return explore(Key{words.root(), false, false}, [&](const Key& k) {
        auto [q, left, right] = k;
        std::array<std::optional<Key>, 2> out;
        State q0 = q == kNoState ? kNoState : words.child(q, 0);
        State q1 = q == kNoState ? kNoState : words.child(q, 1);
        // The midpoint belongs to the left half via 1 0^ω and to the right half via 0 1^ω.
        bool mid_from_right = q != kNoState && accepts_periodic(words, q, one, zero);
        bool mid_from_left = q != kNoState && accepts_periodic(words, q, zero, one);
        if (q0 != kNoState || left || mid_from_right) out[0] = Key{q0, left, mid_from_right};
        if (q1 != kNoState || mid_from_left || right) out[1] = Key{q1, mid_from_left, right};
        return out;
    });
}

/// Branching system of the closed rational interval [lo, hi] ⊆ [0,1].
/// Each subtree is the rescaled interval, and rescaling a rational interval
/// by 2x - b only ever produces finitely many distinct intervals.
inline TreeAutomaton rational_interval_tree(const Rational& lo, const Rational& hi) {
    Rational a = std::max(lo, Rational(0));
    Rational b = std::min(hi, Rational(1));
    if (a > b) return {};
    using Key = std::pair<Rational, Rational>;
    return explore(Key{a, b}, [](const Key& k) {
        std::array<std::optional<Key>, 2> out;
        for (int bit = 0; bit < 2; ++bit) {
            Rational l = 2 * k.first - bit;
            Rational h = 2 * k.second - bit;
            if (h < 0 || l > 1) continue;
            out[bit] = Key{std::max(l, Rational(0)), std::min(h, Rational(1))};
        }
        return out;
    });
}

/// Word automaton of the digit sequences avoiding `pattern` as a factor
/// (states are lengths of the longest suffix that is a prefix of the pattern).
inline TreeAutomaton avoid_words(const BinaryWord& pattern) {
    const std::size_t m = pattern.size();
    TreeAutomaton::Transitions table(m, {kNoState, kNoState});
    for (std::size_t k = 0; k < m; ++k) {
        for (int b = 0; b < 2; ++b) {
            BinaryWord seen = pattern.prefix(k).child(b);
            std::size_t len = std::min(seen.size(), m);
            while (len > 0 && !(seen.str().compare(seen.size() - len, len, pattern.str(), 0, len) == 0)) --len;
            if (len < m) table[k][b] = static_cast<State>(len);
        }
    }
    return TreeAutomaton::from_transitions(table, 0);
}

/// Word automaton of digit sequences whose odd-numbered digits are all 0.
inline TreeAutomaton escale_words() { return TreeAutomaton::from_transitions({{1, kNoState}, {0, 0}}, 0); }

/// Branching system of the closed set denoted by `d`.
inline TreeAutomaton build(const SetDescription& d) {
    d.validate();
    return std::visit(
        overloaded{
            [](const desc::Interval& i) { return rational_interval_tree(i.lo.to_rational(), i.hi.to_rational()); },
            [](const desc::Point& p) { return rational_interval_tree(p.x.to_rational(), p.x.to_rational()); },
            [](const desc::RationalPoint& r) {
                Rational x(r.p, r.q);
                return rational_interval_tree(x, x);
            },
            [](const desc::Avoid& a) { return close_over_endpoints(avoid_words(a.pattern)); },
            [](const desc::Union& u) {
                TreeAutomaton acc;
                for (const auto& p : u.parts) acc = unite(acc, build(p));
                return acc;
            },
            [](const desc::Intersect& i) {
                TreeAutomaton acc = build(i.parts.front());
                for (std::size_t k = 1; k < i.parts.size(); ++k) acc = intersect(acc, build(i.parts[k]));
                return acc;
            },
            [](const desc::EScale&) { return close_over_endpoints(escale_words()); },
            [](const desc::Full&) { return TreeAutomaton::full(); },
            [](const desc::Empty&) { return TreeAutomaton::empty_set(); },
        },
        d.node);
}

inline std::string state_name(State q) { return "q" + std::to_string(q); }

/// Graphviz rendering: one node per state, edges labelled with their digit.
inline std::string to_dot(const TreeAutomaton& t, std::string_view graph_name = "branching") {
    std::ostringstream os;
    os << "digraph " << graph_name << " {\n";
    if (!t.empty()) {
        os << "  init [shape=point];\n";
        os << "  init -> " << state_name(t.root()) << ";\n";
    }
    for (State q = 0; q < t.size(); ++q) {
        os << "  " << state_name(q) << " [label=\"" << state_name(q) << "\"" << (t.is_split(q) ? ", shape=doublecircle" : "")
           << "];\n";
    }
    for (State q = 0; q < t.size(); ++q) {
        for (int b = 0; b < 2; ++b) {
            if (t.has_child(q, b)) {
                os << "  " << state_name(q) << " -> " << state_name(t.child(q, b)) << " [label=\"" << b << "\"];\n";
            }
        }
    }
    os << "}\n";
    return os.str();
}

/// One line per state: `q0: 0->q1 1->q0`.
inline std::string to_text(const TreeAutomaton& t) {
    std::ostringstream os;
    os << "states=" << t.size() << "\n";
    for (State q = 0; q < t.size(); ++q) {
        os << state_name(q) << ":";
        for (int b = 0; b < 2; ++b) {
            if (t.has_child(q, b)) os << " " << b << "->" << state_name(t.child(q, b));
        }
        os << "\n";
    }
    return os.str();
}

} // namespace cbtree

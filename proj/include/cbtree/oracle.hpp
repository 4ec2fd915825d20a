#pragma once

// Naive reference semantics at bounded depth. Nothing in here looks at how
// the automata are built; tests compare the two routes.

#include <functional>
#include <map>
#include <optional>
#include <set>
#include <vector>

#include "cbtree/description.hpp"
#include "cbtree/dyadic.hpp"
#include "cbtree/treeset.hpp"

namespace cbtree::oracle {

/// Words compared below the truncation depth are unreliable in the last
/// kBandMargin levels: a split just below the cut is invisible.
inline constexpr std::size_t kBandMargin = 4;

/// Explicit prefix-closed set of words of length ≤ depth.
struct FiniteTree {
    std::size_t depth = 0;
    std::set<BinaryWord> nodes;

    bool empty() const { return nodes.empty(); }
    bool contains(const BinaryWord& w) const { return nodes.count(w) != 0; }
    bool is_split(const BinaryWord& w) const { return contains(w.child(0)) && contains(w.child(1)); }

    friend bool operator==(const FiniteTree&, const FiniteTree&) = default;
};

inline FiniteTree truncate(const TreeAutomaton& t, std::size_t d) {
    FiniteTree f{d, {}};
    if (t.empty()) return f;
    std::vector<std::pair<BinaryWord, State>> stack{{BinaryWord(), t.root()}};
    while (!stack.empty()) {
        auto [w, q] = stack.back();
        stack.pop_back();
        f.nodes.insert(w);
        if (w.size() == d) continue;
        for (int b = 0; b < 2; ++b) {
            if (t.has_child(q, b)) stack.emplace_back(w.child(b), t.child(q, b));
        }
    }
    return f;
}

/// Words of length ≤ depth only.
inline FiniteTree restrict_depth(const FiniteTree& f, std::size_t depth) {
    FiniteTree out{std::min(depth, f.depth), {}};
    for (const auto& w : f.nodes) {
        if (w.size() <= out.depth) out.nodes.insert(w);
    }
    return out;
}

/// Finite-depth derivative. A root-to-leaf branch is destroyed when it has no
/// split in its last kBandMargin - 1 levels (it has stopped splitting as far as
/// the truncation can tell); what remains is the union of surviving branches.
inline FiniteTree brute_derivative(const FiniteTree& f) {
    constexpr std::size_t window = kBandMargin - 1;
    const std::size_t first = f.depth > window ? f.depth - window : 0;
    FiniteTree out{f.depth, {}};
    // Depth-first over the explicit set, carrying "split seen inside the window".
    std::function<void(const BinaryWord&, bool)> walk = [&](const BinaryWord& w, bool seen) {
        if (w.size() == f.depth) {
            if (seen) {
                for (std::size_t n = 0; n <= w.size(); ++n) out.nodes.insert(w.prefix(n));
            }
            return;
        }
        bool here = seen || (w.size() >= first && f.is_split(w));
        for (int b = 0; b < 2; ++b) {
            if (f.contains(w.child(b))) walk(w.child(b), here);
        }
    };
    if (f.contains(BinaryWord())) walk(BinaryWord(), false);
    return out;
}

/// Result of iterating brute_derivative. After each productive stage the tree
/// is cut back by kBandMargin levels, since only that band is trustworthy.
struct BruteKernel {
    std::size_t rank = 0;
    bool empty = false;
    std::size_t band = 0;  // depth at which the final verdict was taken
};

inline std::optional<BruteKernel> brute_kernel(FiniteTree f) {
    BruteKernel out;
    for (;;) {
        if (f.empty()) {
            out.empty = true;
            out.band = f.depth;
            return out;
        }
        FiniteTree g = brute_derivative(f);
        if (g == f) {
            out.band = f.depth;
            return out;
        }
        ++out.rank;
        if (g.empty()) {
            out.empty = true;
            out.band = f.depth;
            return out;
        }
        if (g.depth <= kBandMargin) return std::nullopt;
        f = restrict_depth(g, g.depth - kBandMargin);
    }
}

namespace detail {

/// Can `w` be extended by `horizon` more digits without creating `pattern`?
/// With fewer than |pattern| automaton-relevant histories, extending by
/// |pattern| digits forces a repetition and hence an infinite extension.
inline bool extends_avoiding(BinaryWord w, const BinaryWord& pattern, std::size_t horizon) {
    if (w.contains(pattern)) return false;
    if (horizon == 0) return true;
    for (int b = 0; b < 2; ++b) {
        if (extends_avoiding(w.child(b), pattern, horizon - 1)) return true;
    }
    return false;
}

inline bool periodic_avoids(const Expansion& e, const BinaryWord& pattern) {
    std::size_t n = e.preperiod.size() + e.period.size() * (pattern.size() + 2);
    return !e.digits(n).contains(pattern);
}

inline bool odd_digits_zero(const BinaryWord& w) {
    for (std::size_t i = 0; i < w.size(); i += 2) {
        if (w[i]) return false;
    }
    return true;
}

// The infinite words z with π(z) in the closed node of w: those starting with
// w, plus pred(w)·1^ω and succ(w)·0^ω at the two endpoints.
template <class WordPred, class PeriodicPred>
bool node_meets_word_set(const BinaryWord& w, WordPred prefix_extends, PeriodicPred periodic_member) {
    if (prefix_extends(w)) return true;
    if (auto p = w.predecessor(); p && periodic_member(Expansion{*p, BinaryWord("1")})) return true;
    if (auto s = w.successor(); s && periodic_member(Expansion{*s, BinaryWord("0")})) return true;
    return false;
}

/// Both expansions of a rational point (one unless it is dyadic).
inline std::vector<Expansion> expansions(const Rational& x) {
    std::vector<Expansion> out{expansion_of(x)};
    if (auto d = DyadicRational::from_rational(x); d && !d->is_zero() && !d->is_one()) {
        BinaryWord digits = d->digits();
        digits.pop_back();
        digits.push_back(0);
        out.push_back({digits, BinaryWord("1")});
    } else if (d && d->is_one()) {
        out = {Expansion{BinaryWord(), BinaryWord("1")}};
    }
    return out;
}

/// Dyadic nodes whose union is [lo, hi] (lo < hi, both dyadic).
inline std::vector<BinaryWord> cover(const DyadicRational& lo, const DyadicRational& hi) {
    std::size_t n = std::max(lo.exponent(), hi.exponent());
    Integer a = lo.numerator() << (n - lo.exponent());
    Integer b = hi.numerator() << (n - hi.exponent());
    std::vector<BinaryWord> out;
    // Greedy aligned blocks, as in a segment tree.
    while (a < b) {
        std::size_t k = 0;
        while (k < n && !bit_test(a, k) && a + (Integer(2) << k) <= b) ++k;
        DyadicInterval iv(n - k, a >> k);
        out.push_back(interval_to_word(iv));
        a += Integer(1) << k;
    }
    return out;
}

struct ClosedInterval {
    Rational lo, hi;
};

inline bool meets(const SetDescription& d, const ClosedInterval& iv);

/// Intersection of the interval-like operands, or nullopt if one is not interval-like.
inline std::optional<ClosedInterval> as_interval(const SetDescription& d) {
    if (auto* i = std::get_if<desc::Interval>(&d.node)) return ClosedInterval{i->lo.to_rational(), i->hi.to_rational()};
    if (auto* p = std::get_if<desc::Point>(&d.node)) return ClosedInterval{p->x.to_rational(), p->x.to_rational()};
    if (auto* r = std::get_if<desc::RationalPoint>(&d.node)) {
        Rational x(r->p, r->q);
        return ClosedInterval{x, x};
    }
    if (std::holds_alternative<desc::Full>(d.node)) return ClosedInterval{0, 1};
    return std::nullopt;
}

/// Word-level sets (Avoid, EScale) against a closed interval with rational ends.
template <class WordPred, class PeriodicPred>
bool word_set_meets(const ClosedInterval& iv, WordPred prefix_extends, PeriodicPred periodic_member) {
    if (iv.lo > iv.hi) return false;
    if (iv.lo == iv.hi) {
        for (const auto& e : expansions(iv.lo)) {
            if (periodic_member(e)) return true;
        }
        return false;
    }
    auto lo = DyadicRational::from_rational(iv.lo);
    auto hi = DyadicRational::from_rational(iv.hi);
    if (!lo || !hi) throw MalformedDescription(iv.lo.str() + ".." + iv.hi.str(), "oracle needs dyadic bounds");
    for (const auto& w : cover(*lo, *hi)) {
        if (node_meets_word_set(w, prefix_extends, periodic_member)) return true;
    }
    return false;
}

inline bool meets(const SetDescription& d, const ClosedInterval& iv) {
    if (iv.lo > iv.hi) return false;
    return std::visit(
        overloaded{
            [&](const desc::Avoid& a) {
                return word_set_meets(
                    iv, [&](const BinaryWord& w) { return extends_avoiding(w, a.pattern, a.pattern.size()); },
                    [&](const Expansion& e) { return periodic_avoids(e, a.pattern); });
            },
            [&](const desc::EScale&) {
                return word_set_meets(
                    iv, [](const BinaryWord& w) { return odd_digits_zero(w); },
                    [](const Expansion& e) {
                        // Need the period to sit on even positions only.
                        std::size_t n = e.preperiod.size() + 2 * e.period.size() + 2;
                        return odd_digits_zero(e.digits(n));
                    });
            },
            [&](const desc::Union& u) {
                for (const auto& p : u.parts) {
                    if (meets(p, iv)) return true;
                }
                return false;
            },
            [&](const desc::Intersect& in) {
                ClosedInterval box = iv;
                std::vector<const SetDescription*> rest;
                for (const auto& p : in.parts) {
                    if (auto i = as_interval(p)) {
                        box.lo = std::max(box.lo, i->lo);
                        box.hi = std::min(box.hi, i->hi);
                    } else {
                        rest.push_back(&p);
                    }
                }
                if (box.lo > box.hi) return false;
                if (rest.empty()) return true;
                if (rest.size() == 1) return meets(*rest.front(), box);
                throw MalformedDescription(d.to_string(), "oracle supports one non-interval operand per intersect");
            },
            [&](const desc::Empty&) { return false; },
            [&](const auto&) {
                auto i = as_interval(d);
                return i->lo <= iv.hi && i->hi >= iv.lo;
            },
        },
        d.node);
}

} // namespace detail

/// Does the closed set described by `d` meet the closed node `iv`? Decided
/// structurally and exactly from the description.
inline bool brute_member(const SetDescription& d, const DyadicInterval& iv) {
    return detail::meets(d, {iv.lo_rational(), iv.hi_rational()});
}

/// Depth-d truncation computed from the description alone.
inline FiniteTree brute_truncate(const SetDescription& d, std::size_t depth) {
    FiniteTree f{depth, {}};
    std::vector<BinaryWord> stack;
    if (brute_member(d, DyadicInterval())) stack.push_back(BinaryWord());
    while (!stack.empty()) {
        BinaryWord w = stack.back();
        stack.pop_back();
        f.nodes.insert(w);
        if (w.size() == depth) continue;
        for (int b = 0; b < 2; ++b) {
            if (brute_member(d, word_to_interval(w.child(b)))) stack.push_back(w.child(b));
        }
    }
    return f;
}

/// Compare prune_once(t) with brute_derivative on depth-d truncations, on
/// words of length ≤ d - kBandMargin.
inline bool safe_band_agrees(const TreeAutomaton& t, const TreeAutomaton& pruned, std::size_t d) {
    std::size_t band = d - kBandMargin;
    return restrict_depth(truncate(pruned, d), band) == restrict_depth(brute_derivative(truncate(t, d)), band);
}

} // namespace cbtree::oracle

#pragma once

#include <algorithm>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_set>
#include <utility>
#include <vector>

#include "cbtree/description.hpp"
#include "cbtree/dyadic.hpp"
#include "cbtree/error.hpp"
#include "cbtree/oracle.hpp"
#include "cbtree/pruning.hpp"
#include "cbtree/treeset.hpp"

namespace cbtree {

/// A countable linear order given by an injective enumeration (1-based) and
/// a strict comparison. `size` is set for finite orders.
template <class T, class Less = std::less<T>>
class CountableOrder {
public:
    using value_type = T;

    CountableOrder(std::string name, std::function<T(std::size_t)> at, std::optional<std::size_t> size = {},
                   Less less = {})
        : name_(std::move(name)), at_(std::move(at)), size_(size), less_(std::move(less)) {}

    const std::string& name() const noexcept { return name_; }
    std::optional<std::size_t> size() const noexcept { return size_; }

    T at(std::size_t i) const {
        if (i == 0 || (size_ && i > *size_)) throw OutOfRange(name_ + "[" + std::to_string(i) + "]", "enumeration index");
        return at_(i);
    }

    /// Number of elements among the first n that exist.
    std::size_t available(std::size_t n) const { return size_ ? std::min(n, *size_) : n; }

    std::vector<T> prefix(std::size_t n) const {
        std::vector<T> out;
        const std::size_t m = available(n);
        out.reserve(m);
        for (std::size_t i = 1; i <= m; ++i) out.push_back(at_(i));
        return out;
    }

    bool less(const T& a, const T& b) const { return less_(a, b); }
    const Less& comparator() const noexcept { return less_; }

private:
    std::string name_;
    std::function<T(std::size_t)> at_;
    std::optional<std::size_t> size_;
    Less less_;
};

using DyadicOrder = CountableOrder<DyadicRational>;

/// i-th dyadic rational of (0,1) in breadth-first order: 1/2, 1/4, 3/4, 1/8, ...
inline DyadicRational dyadic_at(std::size_t i) {
    if (i == 0) throw OutOfRange("0", "enumeration index");
    std::size_t level = 0;
    while ((std::size_t(1) << (level + 1)) <= i) ++level;
    std::size_t offset = i - (std::size_t(1) << level);
    return DyadicRational(Integer(2 * offset + 1), level + 1);
}

/// Inverse of dyadic_at on (0,1).
inline std::size_t dyadic_index(const DyadicRational& x) {
    if (x.is_zero() || x.is_one()) throw OutOfRange(x.to_string(), "not in (0,1)");
    if (x.exponent() >= 63) throw OutOfRange(x.to_string(), "index exceeds 64 bits");
    std::size_t odd = static_cast<std::size_t>(x.numerator());
    return (std::size_t(1) << (x.exponent() - 1)) + (odd - 1) / 2;
}

inline DyadicOrder dyadic_scale() { return DyadicOrder("D", dyadic_at); }

inline DyadicOrder e_scale() {
    return DyadicOrder("E", [](std::size_t i) { return e_map(dyadic_at(i)); });
}

/// 1 - 2^-n, n ≥ 1: order type ω.
inline DyadicOrder omega_order() {
    return DyadicOrder("omega", [](std::size_t i) { return DyadicRational(pow2(i) - 1, i); });
}

inline DyadicOrder finite_order(std::vector<DyadicRational> elements, std::string name = "finite") {
    std::set<DyadicRational> seen(elements.begin(), elements.end());
    if (seen.size() != elements.size()) throw MalformedDescription(name, "duplicate element in enumeration");
    const std::size_t n = elements.size();
    return DyadicOrder(
        std::move(name), [elements = std::move(elements)](std::size_t i) { return elements.at(i - 1); }, n);
}

/// A built-in order together with the description of its closure, when that
/// closure is a regular set.
struct NamedOrder {
    DyadicOrder order;
    std::optional<SetDescription> closure;
};

/// `D`, `E`, `omega` or `finite:<a/2^n,...>`. Unknown names throw std::invalid_argument.
inline NamedOrder named_order(std::string_view name) {
    if (name == "D") return {dyadic_scale(), SetDescription::full()};
    if (name == "E") return {e_scale(), SetDescription::escale()};
    if (name == "omega") {
        // Closure {1 - 2^-n} ∪ {1}: words 1^n 0^ω and 1^ω, kept right of 1/2.
        return {omega_order(), SetDescription::intersect({SetDescription::avoid(BinaryWord("01")),
                                                          SetDescription::interval(DyadicRational(1, 1),
                                                                                   DyadicRational::one())})};
    }
    if (name.starts_with("finite:")) {
        std::vector<DyadicRational> elements;
        std::string_view list = name.substr(7);
        while (!list.empty()) {
            auto comma = list.find(',');
            elements.push_back(DyadicRational::parse(list.substr(0, comma)));
            if (comma == std::string_view::npos) break;
            list.remove_prefix(comma + 1);
        }
        std::vector<SetDescription> points;
        for (const auto& x : elements) points.push_back(SetDescription::point(x));
        std::optional<SetDescription> closure =
            points.empty() ? SetDescription::empty() : SetDescription::unite(std::move(points));
        return {finite_order(std::move(elements), std::string(name)), std::move(closure)};
    }
    throw std::invalid_argument("unknown order '" + std::string(name) + "'");
}

// ---------------------------------------------------------------------------
// η detection

enum class EtaOutcome { ConsistentWithEta, EndpointFound, GapFound };

template <class T>
struct EtaVerdict {
    EtaOutcome outcome = EtaOutcome::ConsistentWithEta;
    std::optional<T> endpoint;
    bool endpoint_is_min = true;
    std::optional<std::pair<T, T>> gap;
    std::size_t depth_checked = 0;

    bool consistent() const { return outcome == EtaOutcome::ConsistentWithEta; }

    std::string to_string() const {
        std::ostringstream os;
        switch (outcome) {
        case EtaOutcome::ConsistentWithEta:
            os << "consistent-with-eta";
            break;
        case EtaOutcome::EndpointFound:
            os << "endpoint " << (endpoint_is_min ? "min=" : "max=");
            if (endpoint) os << *endpoint;
            break;
        case EtaOutcome::GapFound:
            os << "gap " << gap->first << " " << gap->second;
            break;
        }
        os << " depth=" << depth_checked;
        return os.str();
    }
};

/// Divisor for the probe prefix: pairs adjacent among the first n/4 elements
/// must be separated by some element among the first n.
inline constexpr std::size_t kEtaProbeDivisor = 4;

/// Finite-prefix test for density without endpoints. A consistent verdict
/// is only a semidecision; gap and endpoint verdicts name their witnesses.
template <class T, class Less>
EtaVerdict<T> eta_check(const CountableOrder<T, Less>& o, std::size_t n) {
    if (n < 2) throw std::invalid_argument("eta_check needs n >= 2");
    EtaVerdict<T> v;
    std::vector<T> all = o.prefix(n);
    v.depth_checked = all.size();
    auto less = [&](const T& a, const T& b) { return o.less(a, b); };

    if (o.size() && *o.size() <= n) {
        // The whole order is known: it is finite, hence not η.
        std::sort(all.begin(), all.end(), less);
        if (all.size() >= 2) {
            v.outcome = EtaOutcome::GapFound;
            v.gap = std::pair{all[0], all[1]};
        } else {
            v.outcome = EtaOutcome::EndpointFound;
            if (!all.empty()) v.endpoint = all.front();
        }
        return v;
    }

    const std::size_t probe_size = std::max<std::size_t>(1, n / kEtaProbeDivisor);
    std::vector<T> probe(all.begin(), all.begin() + std::min(probe_size, all.size()));
    std::vector<T> sorted_all = all;
    std::sort(probe.begin(), probe.end(), less);
    std::sort(sorted_all.begin(), sorted_all.end(), less);

    for (std::size_t i = 0; i + 1 < probe.size(); ++i) {
        auto above = std::upper_bound(sorted_all.begin(), sorted_all.end(), probe[i], less);
        if (above == sorted_all.end() || !less(*above, probe[i + 1])) {
            v.outcome = EtaOutcome::GapFound;
            v.gap = std::pair{probe[i], probe[i + 1]};
            return v;
        }
    }
    if (!less(sorted_all.front(), probe.front())) {
        v.outcome = EtaOutcome::EndpointFound;
        v.endpoint = probe.front();
        v.endpoint_is_min = true;
        return v;
    }
    if (!less(probe.back(), sorted_all.back())) {
        v.outcome = EtaOutcome::EndpointFound;
        v.endpoint = probe.back();
        v.endpoint_is_min = false;
        return v;
    }
    return v;
}

// ---------------------------------------------------------------------------
// Back and forth

/// Depth at which back_and_forth checks both orders for η: at least n, and
/// never less than this, since a handful of elements cannot exhibit density.
inline constexpr std::size_t kMinEtaDepth = 16;
inline constexpr std::size_t kDefaultSearchLimit = std::size_t(1) << 22;

/// Cantor's alternating construction. Odd rounds extend the domain with the
/// next unmatched element of `a`, even rounds extend the range with the next
/// unmatched element of `b`; the partner is always the least-index element
/// on the other side that keeps the partial map order-preserving.
template <class A, class LA, class B, class LB>
std::vector<std::pair<A, B>> back_and_forth(const CountableOrder<A, LA>& a, const CountableOrder<B, LB>& b,
                                            std::size_t n, std::size_t search_limit = kDefaultSearchLimit) {
    const std::size_t depth = std::max(n, kMinEtaDepth);
    if (auto va = eta_check(a, depth); !va.consistent()) throw NotEta(a.name(), va.to_string());
    if (auto vb = eta_check(b, depth); !vb.consistent()) throw NotEta(b.name(), vb.to_string());

    auto a_less = [&](const A& x, const A& y) { return a.less(x, y); };
    auto b_less = [&](const B& x, const B& y) { return b.less(x, y); };
    std::map<A, B, decltype(a_less)> forth(a_less);
    std::map<B, A, decltype(b_less)> back(b_less);
    std::unordered_set<std::size_t> used_a, used_b;
    std::size_t next_a = 1, next_b = 1;
    std::vector<std::pair<A, B>> out;
    out.reserve(n);

    // Least-index unused element of `side` lying strictly between the images of
    // the neighbours of x in the already matched part.
    auto partner = [&](const auto& side, auto& used, const auto& matched, const auto& other_x, auto side_less)
        -> std::optional<std::pair<std::size_t, typename std::decay_t<decltype(side)>::value_type>> {
        auto hi = matched.upper_bound(other_x);
        auto lo = hi == matched.begin() ? matched.end() : std::prev(hi);
        const std::size_t limit = side.available(search_limit);
        for (std::size_t j = 1; j <= limit; ++j) {
            if (used.count(j)) continue;
            auto y = side.at(j);
            if (lo != matched.end() && !side_less(lo->second, y)) continue;
            if (hi != matched.end() && !side_less(y, hi->second)) continue;
            return std::pair{j, y};
        }
        return std::nullopt;
    };

    for (std::size_t round = 1; round <= n; ++round) {
        if (round % 2 == 1) {
            while (used_a.count(next_a)) ++next_a;
            A x = a.at(next_a);
            auto found = partner(b, used_b, forth, x, b_less);
            if (!found) throw NotEta(b.name(), "no partner for " + std::to_string(next_a) + " within search limit");
            used_a.insert(next_a);
            used_b.insert(found->first);
            forth.emplace(x, found->second);
            back.emplace(found->second, x);
            out.emplace_back(x, found->second);
        } else {
            while (used_b.count(next_b)) ++next_b;
            B y = b.at(next_b);
            auto found = partner(a, used_a, back, y, a_less);
            if (!found) throw NotEta(a.name(), "no partner for " + std::to_string(next_b) + " within search limit");
            used_b.insert(next_b);
            used_a.insert(found->first);
            forth.emplace(found->second, y);
            back.emplace(y, found->second);
            out.emplace_back(found->second, y);
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Overlay

enum class EndpointRule { Left, Right };

/// Target scale of the overlay map D → scale.
class Scale {
public:
    enum class Kind { Identity, EFormula, Enumerated };

    static Scale identity() { return Scale(Kind::Identity, std::nullopt); }
    static Scale e_formula() { return Scale(Kind::EFormula, std::nullopt); }
    static Scale enumerated(DyadicOrder order) { return Scale(Kind::Enumerated, std::move(order)); }

    Kind kind() const noexcept { return kind_; }
    const DyadicOrder& order() const { return *order_; }
    std::string name() const {
        switch (kind_) {
        case Kind::Identity: return "D";
        case Kind::EFormula: return "E";
        default: return order_->name();
        }
    }

private:
    Scale(Kind k, std::optional<DyadicOrder> o) : kind_(k), order_(std::move(o)) {}
    Kind kind_;
    std::optional<DyadicOrder> order_;
};

/// Exact limit, or (when `exact` is false) the best value found at `depth`.
struct OverlayValue {
    Rational value;
    bool exact = true;
    std::size_t depth = 0;

    std::string to_string() const {
        if (exact) return format_rational(value);
        return "approx=" + format_rational(value) + " depth=" + std::to_string(depth);
    }
};

inline constexpr std::size_t kDefaultApproximationDepth = 24;

/// Extends the scale isomorphism φ: D → scale to a point x of [0,1]. Rule
/// Right takes the limit of φ along dyadics decreasing to x (which is φ(x)
/// itself at a scale point), rule Left the limit along dyadics increasing to x.
/// At a gap of the image the two rules disagree.
inline OverlayValue overlay(const Scale& scale, const DyadicRational& x, EndpointRule rule,
                            std::size_t approximation_depth = kDefaultApproximationDepth) {
    switch (scale.kind()) {
    case Scale::Kind::Identity:
        return {x.to_rational()};
    case Scale::Kind::EFormula: {
        Rational right = e_map(x).to_rational();
        if (rule == EndpointRule::Right || x.is_zero()) return {right};
        // x = 0.d1...d(n-1)1 is also 0.d1...d(n-1)0111...; the last digit's
        // contribution 4^-n becomes Σ_{i>n} 4^-i = 4^-n / 3.
        Rational last(1, pow2(2 * x.exponent()));
        return {right - last + last / 3};
    }
    case Scale::Kind::Enumerated:
        break;
    }
    const DyadicOrder& target = scale.order();
    if (x.is_zero() || x.is_one()) throw OutOfRange(x.to_string(), "enumerated scales extend to (0,1) only");
    if (auto v = eta_check(target, kMinEtaDepth * 4); !v.consistent()) throw NotEta(target.name(), v.to_string());

    DyadicOrder domain = dyadic_scale();
    std::size_t needed = dyadic_index(x);
    std::size_t k = std::max(approximation_depth, x.exponent() + 1);
    Integer below_num = (x.numerator() << (k - x.exponent())) - 1;
    DyadicRational below(below_num, k);
    if (rule == EndpointRule::Left) needed = std::max(needed, dyadic_index(below));
    auto pairs = back_and_forth(domain, target, 2 * needed);

    if (rule == EndpointRule::Right) {
        for (const auto& [d, s] : pairs) {
            if (d == x) return {s.to_rational()};
        }
        throw NotEta(target.name(), "no image for " + x.to_string());
    }
    std::optional<DyadicRational> best;
    for (const auto& [d, s] : pairs) {
        if (d < x && (!best || *best < s)) best = s;
    }
    return {best->to_rational(), false, k};
}

// ---------------------------------------------------------------------------
// Closure construction

struct ClosureOptions {
    std::size_t depth = 10;     // truncation depth for non-regular inputs
    std::size_t limit = 32;     // enumerated elements classified into J, J1, J2
};

/// The closure M of an enumerated M1, its perfect kernel, and the split of
/// the kernel points J of M1 into left gap endpoints J2 and the rest J1.
struct ClosureDecomposition {
    TreeAutomaton tree;
    TreeAutomaton kernel;
    bool truncated = false;
    std::size_t examined = 0;
    std::vector<DyadicRational> J, J1, J2;
    /// Left endpoints of complementary intervals longer than 2^-depth, any kind of point.
    std::vector<Rational> gap_left_endpoints;

    bool countable_closure() const { return kernel.empty(); }

    std::string to_string() const {
        std::ostringstream os;
        os << "tree_states=" << tree.size() << " kernel_states=" << kernel.size()
           << " truncated=" << (truncated ? "yes" : "no") << " countable_closure=" << (countable_closure() ? "yes" : "no")
           << " examined=" << examined << "\n";
        auto list = [&](const char* label, const std::vector<DyadicRational>& xs) {
            os << label << "[1.." << xs.size() << "]:";
            for (const auto& x : xs) os << " " << x;
            os << "\n";
        };
        list("J", J);
        list("J1", J1);
        list("J2", J2);
        os << "gaps[1.." << gap_left_endpoints.size() << "]:";
        for (const auto& g : gap_left_endpoints) os << " {" << format_rational(g) << "}";
        os << "\n";
        return os.str();
    }
};

/// Expansions of a dyadic point as branches: w0^ω and, for interior points, w'1^ω.
inline std::vector<Expansion> dyadic_expansions(const DyadicRational& x) {
    if (x.is_one()) return {{BinaryWord(), BinaryWord("1")}};
    std::vector<Expansion> out{{x.digits(), BinaryWord("0")}};
    if (!x.is_zero()) {
        BinaryWord w = x.digits();
        w.pop_back();
        w.push_back(0);
        out.push_back({w, BinaryWord("1")});
    }
    return out;
}

inline bool on_branches(const TreeAutomaton& t, const DyadicRational& x) {
    if (t.empty()) return false;
    for (const auto& e : dyadic_expansions(x)) {
        if (accepts_periodic(t, t.root(), e.preperiod, e.period)) return true;
    }
    return false;
}

/// Is x ∈ M the left end of a complementary interval (x, x + ε)?
inline bool is_left_gap_endpoint(const TreeAutomaton& t, const DyadicRational& x) {
    if (x.is_one() || !on_branches(t, x)) return false;
    State q = t.walk(x.digits());
    if (q == kNoState) return false;
    // Along x 0 0 0 ... the states cycle; points right of x exist near x
    // unless no state on the cycle offers a 1.
    std::map<State, std::size_t> seen;
    std::vector<State> path;
    while (seen.emplace(q, path.size()).second) {
        path.push_back(q);
        q = t.child(q, 0);
        if (q == kNoState) return false;
    }
    for (std::size_t i = seen[q]; i < path.size(); ++i) {
        if (t.has_child(path[i], 1)) return false;
    }
    return true;
}

/// Right-most branch below state q, as an expansion.
inline Expansion rightmost_tail(const TreeAutomaton& t, State q) {
    std::map<State, std::size_t> seen;
    BinaryWord w;
    while (seen.emplace(q, w.size()).second) {
        int b = t.has_child(q, 1) ? 1 : 0;
        w.push_back(b);
        q = t.child(q, b);
    }
    std::size_t start = seen[q];
    return {w.prefix(start), BinaryWord(w.str().substr(start))};
}

/// Left endpoints of complementary intervals that contain a dyadic midpoint of
/// some node of depth < depth.
inline std::vector<Rational> gap_left_endpoints(const TreeAutomaton& t, std::size_t depth) {
    std::set<Rational> out;
    if (t.empty()) return {};
    std::vector<std::pair<BinaryWord, State>> layer{{BinaryWord(), t.root()}};
    for (std::size_t d = 0; d < depth; ++d) {
        std::vector<std::pair<BinaryWord, State>> next;
        for (const auto& [w, q] : layer) {
            if (t.has_child(q, 0) && !t.has_child(q, 1)) {
                Expansion tail = rightmost_tail(t, t.child(q, 0));
                out.insert(Expansion{w.child(0) + tail.preperiod, tail.period}.value());
            }
            for (int b = 0; b < 2; ++b) {
                if (t.has_child(q, b)) next.emplace_back(w.child(b), t.child(q, b));
            }
        }
        layer.swap(next);
    }
    return {out.begin(), out.end()};
}

namespace detail {

/// Depth-k branching system of finitely many points, explicit.
inline oracle::FiniteTree sample_tree(const std::vector<DyadicRational>& points, std::size_t k) {
    oracle::FiniteTree f{k, {}};
    for (const auto& x : points) {
        for (const auto& e : dyadic_expansions(x)) {
            BinaryWord w = e.digits(k);
            for (std::size_t n = 0; n <= k; ++n) f.nodes.insert(w.prefix(n));
        }
    }
    return f;
}

inline bool sample_kernel_empty(const DyadicOrder& m1, const std::vector<DyadicRational>& sample, std::size_t k) {
    auto status = oracle::brute_kernel(sample_tree(sample, k));
    if (!status) throw DepthTooSmall(m1.name(), "depth " + std::to_string(k) + " leaves no trustworthy band");
    return status->empty;
}

} // namespace detail

inline constexpr std::size_t kMaxTruncationDepth = 20;

/// Builds the closure of M1 and decomposes its kernel points. With a regular
/// closure description the tree is exact; otherwise the first 2^depth points
/// are sampled and kernel emptiness must agree at depths depth-1 and depth.
inline ClosureDecomposition closure_construct(const DyadicOrder& m1, const ClosureOptions& options,
                                              const std::optional<SetDescription>& closure = std::nullopt) {
    ClosureDecomposition out;
    if (closure) {
        out.tree = build(*closure);
        out.kernel = perfect_kernel(out.tree).kernel;
    } else {
        if (options.depth < oracle::kBandMargin + 2 || options.depth > kMaxTruncationDepth) {
            throw DepthTooSmall(m1.name(), "truncation depth must lie in [" + std::to_string(oracle::kBandMargin + 2) +
                                               ", " + std::to_string(kMaxTruncationDepth) + "]");
        }
        out.truncated = true;
        std::vector<DyadicRational> sample = m1.prefix(std::size_t(1) << options.depth);
        bool coarse = detail::sample_kernel_empty(m1, sample, options.depth - 1);
        bool fine = detail::sample_kernel_empty(m1, sample, options.depth);
        if (coarse != fine) {
            throw DepthTooSmall(m1.name(), "kernel status differs between depth " + std::to_string(options.depth - 1) +
                                               " and " + std::to_string(options.depth));
        }
        std::vector<SetDescription> parts;
        for (const auto& x : sample) parts.push_back(SetDescription::point(x));
        if (!fine) {
            // Outer approximation: every surviving node at the final band becomes a full interval.
            oracle::FiniteTree f = detail::sample_tree(sample, options.depth);
            oracle::FiniteTree g = oracle::brute_derivative(f);
            for (const auto& w : g.nodes) {
                if (w.size() != g.depth) continue;
                DyadicInterval iv = word_to_interval(w);
                parts.push_back(SetDescription::interval(iv.lo(), iv.hi()));
            }
        }
        out.tree = parts.empty() ? TreeAutomaton() : build(SetDescription::unite(std::move(parts)));
        out.kernel = fine ? TreeAutomaton() : perfect_kernel(out.tree).kernel;
    }

    out.examined = m1.available(options.limit);
    for (std::size_t i = 1; i <= out.examined; ++i) {
        DyadicRational x = m1.at(i);
        if (!on_branches(out.kernel, x)) continue;
        out.J.push_back(x);
        (is_left_gap_endpoint(out.tree, x) ? out.J2 : out.J1).push_back(x);
    }
    out.gap_left_endpoints = gap_left_endpoints(out.tree, options.depth);
    return out;
}

// ---------------------------------------------------------------------------
// Exclusions

using RationalOrder = CountableOrder<Rational>;

/// The same enumeration with values viewed as rationals.
inline RationalOrder as_rational_order(const DyadicOrder& o) {
    return RationalOrder(
        o.name(), [o](std::size_t i) { return o.at(i).to_rational(); }, o.size());
}

/// M = branches(base) minus the points enumerated by `exclusions`.
struct ExcludedSet {
    TreeAutomaton base;
    RationalOrder exclusions;
    std::size_t check_limit = 1024;  // exclusion elements consulted when the order is infinite
};

/// Rational points of the subtree below q, when there are finitely many.
inline std::optional<std::vector<Rational>> finite_subtree_points(const TreeAutomaton& t, State q,
                                                                  const BinaryWord& node) {
    std::vector<char> live = reaches_split(t);
    // Infinitely many branches iff some reachable split lies on a cycle.
    std::vector<State> reach{q};
    std::vector<char> seen(t.size(), 0);
    seen[q] = 1;
    for (std::size_t i = 0; i < reach.size(); ++i) {
        for (int b = 0; b < 2; ++b) {
            State c = t.child(reach[i], b);
            if (c != kNoState && !seen[c]) {
                seen[c] = 1;
                reach.push_back(c);
            }
        }
    }
    for (State s : reach) {
        if (!t.is_split(s)) continue;
        std::vector<State> stack{t.child(s, 0), t.child(s, 1)};
        std::vector<char> visited(t.size(), 0);
        while (!stack.empty()) {
            State r = stack.back();
            stack.pop_back();
            if (r == s) return std::nullopt;
            if (visited[r]) continue;
            visited[r] = 1;
            for (int b = 0; b < 2; ++b) {
                if (t.has_child(r, b)) stack.push_back(t.child(r, b));
            }
        }
    }
    std::set<Rational> points;
    std::vector<std::pair<State, BinaryWord>> stack{{q, node}};
    while (!stack.empty()) {
        auto [r, w] = stack.back();
        stack.pop_back();
        if (!live[r]) {
            Expansion tail = forced_tail(t, r);
            points.insert(Expansion{w + tail.preperiod, tail.period}.value());
            continue;
        }
        for (int b = 0; b < 2; ++b) {
            if (t.has_child(r, b)) stack.emplace_back(t.child(r, b), w.child(b));
        }
    }
    return std::vector<Rational>(points.begin(), points.end());
}

/// Node membership for base \ M2: false iff w is not a node of base or every
/// point of base inside w's interval is excluded. A subtree with infinitely
/// many branches can never be exhausted by the finitely many exclusions consulted.
inline bool subtract_countable(const ExcludedSet& m, const BinaryWord& w) {
    State q = m.base.walk(w);
    if (q == kNoState) return false;
    auto points = finite_subtree_points(m.base, q, w);
    if (!points) return true;
    std::set<Rational> excluded;
    for (const auto& x : m.exclusions.prefix(m.check_limit)) excluded.insert(x);
    for (const auto& p : *points) {
        if (!excluded.count(p)) return true;
    }
    return false;
}

} // namespace cbtree

#pragma once

#include <cctype>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "cbtree/dyadic.hpp"
#include "cbtree/error.hpp"

namespace cbtree {

struct SetDescription;

namespace desc {

struct Interval {
    DyadicRational lo, hi;
};
struct Point {
    DyadicRational x;
};
/// The point p/q, kept as its eventually periodic expansion.
struct RationalPoint {
    Integer p, q;
};
/// Points having an expansion in which `pattern` never occurs as a factor.
struct Avoid {
    BinaryWord pattern;
};
struct Union {
    std::vector<SetDescription> parts;
};
struct Intersect {
    std::vector<SetDescription> parts;
};
/// Closure of the dyadic points whose odd-numbered digits are all 0.
struct EScale {};
struct Full {};
struct Empty {};

} // namespace desc

/// Abstract syntax of the set-description language; every value denotes a
/// closed subset of [0,1].
struct SetDescription {
    using Node = std::variant<desc::Interval, desc::Point, desc::RationalPoint, desc::Avoid, desc::Union,
                              desc::Intersect, desc::EScale, desc::Full, desc::Empty>;
    Node node;

    static SetDescription interval(DyadicRational lo, DyadicRational hi) { return {desc::Interval{lo, hi}}; }
    static SetDescription point(DyadicRational x) { return {desc::Point{x}}; }
    static SetDescription rational(Integer p, Integer q) { return {desc::RationalPoint{p, q}}; }
    static SetDescription avoid(BinaryWord pattern) { return {desc::Avoid{std::move(pattern)}}; }
    static SetDescription unite(std::vector<SetDescription> parts) { return {desc::Union{std::move(parts)}}; }
    static SetDescription intersect(std::vector<SetDescription> parts) {
        return {desc::Intersect{std::move(parts)}};
    }
    static SetDescription escale() { return {desc::EScale{}}; }
    static SetDescription full() { return {desc::Full{}}; }
    static SetDescription empty() { return {desc::Empty{}}; }

    std::string to_string() const;
    /// Throws MalformedDescription on the first violated invariant.
    void validate() const;
};

template <class... Fs>
struct overloaded : Fs... {
    using Fs::operator()...;
};
template <class... Fs>
overloaded(Fs...) -> overloaded<Fs...>;

inline std::string SetDescription::to_string() const {
    auto list = [](std::string head, const std::vector<SetDescription>& parts) {
        for (const auto& p : parts) head += " " + p.to_string();
        return "(" + head + ")";
    };
    return std::visit(
        overloaded{
            [](const desc::Interval& i) { return "(interval " + i.lo.to_string() + " " + i.hi.to_string() + ")"; },
            [](const desc::Point& p) { return "(point " + p.x.to_string() + ")"; },
            [](const desc::RationalPoint& r) { return "(rational " + r.p.str() + " " + r.q.str() + ")"; },
            [](const desc::Avoid& a) { return "(avoid " + a.pattern.str() + ")"; },
            [&](const desc::Union& u) { return list("union", u.parts); },
            [&](const desc::Intersect& i) { return list("intersect", i.parts); },
            [](const desc::EScale&) { return std::string("(escale)"); },
            [](const desc::Full&) { return std::string("(full)"); },
            [](const desc::Empty&) { return std::string("(empty)"); },
        },
        node);
}

inline void SetDescription::validate() const {
    std::visit(overloaded{
                   [this](const desc::Interval& i) {
                       if (i.hi < i.lo) throw MalformedDescription(to_string(), "interval requires lo <= hi");
                   },
                   [this](const desc::RationalPoint& r) {
                       if (r.q <= 0 || r.p < 0 || r.p > r.q)
                           throw MalformedDescription(to_string(), "rational point outside [0,1]");
                   },
                   [this](const desc::Avoid& a) {
                       if (a.pattern.empty()) throw MalformedDescription(to_string(), "empty avoid pattern");
                   },
                   [this](const desc::Union& u) {
                       if (u.parts.empty()) throw MalformedDescription(to_string(), "union needs operands");
                       for (const auto& p : u.parts) p.validate();
                   },
                   [this](const desc::Intersect& i) {
                       if (i.parts.empty()) throw MalformedDescription(to_string(), "intersect needs operands");
                       for (const auto& p : i.parts) p.validate();
                   },
                   [](const auto&) {},
               },
               node);
}

namespace detail {

class SexprParser {
public:
    explicit SexprParser(std::string_view text) : text_(text) {}

    SetDescription parse_document() {
        SetDescription d = parse_expr();
        skip_space();
        if (pos_ != text_.size()) fail("trailing input");
        d.validate();
        return d;
    }

private:
    [[noreturn]] void fail(const std::string& why) const {
        std::string near(text_.substr(pos_ < text_.size() ? pos_ : text_.size(), 24));
        throw MalformedDescription(near.empty() ? "<end of input>" : near, why);
    }

    void skip_space() {
        while (pos_ < text_.size()) {
            char c = text_[pos_];
            if (c == ';') {
                while (pos_ < text_.size() && text_[pos_] != '\n') ++pos_;
            } else if (std::isspace(static_cast<unsigned char>(c))) {
                ++pos_;
            } else {
                break;
            }
        }
    }

    std::string_view atom() {
        skip_space();
        std::size_t start = pos_;
        while (pos_ < text_.size()) {
            char c = text_[pos_];
            if (c == '(' || c == ')' || c == ';' || std::isspace(static_cast<unsigned char>(c))) break;
            ++pos_;
        }
        if (start == pos_) fail("expected atom");
        return text_.substr(start, pos_ - start);
    }

    void expect(char c) {
        skip_space();
        if (pos_ >= text_.size() || text_[pos_] != c) fail(std::string("expected '") + c + "'");
        ++pos_;
    }

    bool at_close() {
        skip_space();
        return pos_ < text_.size() && text_[pos_] == ')';
    }

    DyadicRational dyadic() {
        std::string_view text = atom();
        try {
            return DyadicRational::parse(text);
        } catch (const OutOfRange&) {
            throw MalformedDescription(std::string(text), "point outside [0,1]");
        }
    }

    SetDescription parse_expr() {
        expect('(');
        std::string head(atom());
        SetDescription out;
        if (head == "interval") {
            auto lo = dyadic();
            auto hi = dyadic();
            out = SetDescription::interval(lo, hi);
        } else if (head == "point") {
            out = SetDescription::point(dyadic());
        } else if (head == "rational") {
            std::string_view p = atom();
            std::string_view q = atom();
            out = SetDescription::rational(detail::parse_integer(p, p), detail::parse_integer(q, q));
        } else if (head == "avoid") {
            out = SetDescription::avoid(BinaryWord(atom()));
        } else if (head == "union" || head == "intersect") {
            std::vector<SetDescription> parts;
            while (!at_close()) parts.push_back(parse_expr());
            out = head == "union" ? SetDescription::unite(std::move(parts))
                                  : SetDescription::intersect(std::move(parts));
        } else if (head == "escale") {
            out = SetDescription::escale();
        } else if (head == "full") {
            out = SetDescription::full();
        } else if (head == "empty") {
            out = SetDescription::empty();
        } else {
            fail("unknown form '" + head + "'");
        }
        expect(')');
        return out;
    }

    std::string_view text_;
    std::size_t pos_ = 0;
};

} // namespace detail

/// Parses exactly one s-expression, e.g. `(union (point 1/2^1) (avoid 11))`.
inline SetDescription parse_description(std::string_view text) { return detail::SexprParser(text).parse_document(); }

} // namespace cbtree

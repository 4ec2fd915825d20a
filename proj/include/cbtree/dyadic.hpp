#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <compare>
#include <cstddef>
#include <functional>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>

#include "cbtree/error.hpp"

namespace cbtree {

using Integer = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

inline Integer pow2(std::size_t n) { return Integer(1) << n; }

/// A finite word over {0,1}. The empty word is the root of the branching
/// system; digit positions are 1-based when read as a binary expansion.
class BinaryWord {
public:
    BinaryWord() = default;

    /// Accepts only '0' and '1'.
    explicit BinaryWord(std::string_view bits) : bits_(bits) {
        for (char c : bits_) {
            if (c != '0' && c != '1') throw MalformedDescription(std::string(bits), "binary word");
        }
    }

    std::size_t size() const noexcept { return bits_.size(); }
    bool empty() const noexcept { return bits_.empty(); }
    int operator[](std::size_t i) const { return bits_[i] == '1' ? 1 : 0; }
    int back() const { return bits_.back() == '1' ? 1 : 0; }

    void push_back(int bit) { bits_.push_back(bit ? '1' : '0'); }
    void pop_back() { bits_.pop_back(); }

    BinaryWord operator+(const BinaryWord& tail) const {
        BinaryWord out = *this;
        out.bits_ += tail.bits_;
        return out;
    }
    BinaryWord& operator+=(const BinaryWord& tail) {
        bits_ += tail.bits_;
        return *this;
    }
    BinaryWord child(int bit) const {
        BinaryWord out = *this;
        out.push_back(bit);
        return out;
    }

    BinaryWord prefix(std::size_t n) const { return BinaryWord(bits_.substr(0, n), Trusted{}); }
    bool starts_with(const BinaryWord& p) const { return bits_.starts_with(p.bits_); }
    bool contains(const BinaryWord& factor) const { return bits_.find(factor.bits_) != std::string::npos; }

    /// Word of the same length naming the next interval to the right, if any.
    std::optional<BinaryWord> successor() const {
        auto pos = bits_.find_last_of('0');
        if (pos == std::string::npos) return std::nullopt;
        BinaryWord out = *this;
        out.bits_[pos] = '1';
        for (std::size_t i = pos + 1; i < out.bits_.size(); ++i) out.bits_[i] = '0';
        return out;
    }
    std::optional<BinaryWord> predecessor() const {
        auto pos = bits_.find_last_of('1');
        if (pos == std::string::npos) return std::nullopt;
        BinaryWord out = *this;
        out.bits_[pos] = '0';
        for (std::size_t i = pos + 1; i < out.bits_.size(); ++i) out.bits_[i] = '1';
        return out;
    }

    const std::string& str() const noexcept { return bits_; }

    friend auto operator<=>(const BinaryWord&, const BinaryWord&) = default;
    friend bool operator==(const BinaryWord&, const BinaryWord&) = default;
    friend std::ostream& operator<<(std::ostream& os, const BinaryWord& w) { return os << w.bits_; }

private:
    struct Trusted {};
    BinaryWord(std::string bits, Trusted) : bits_(std::move(bits)) {}

    std::string bits_;
};

/// Exact point numerator / 2^exponent of [0,1], always normalized
/// (exponent 0 or odd numerator), so equal values compare bitwise equal.
class DyadicRational {
public:
    DyadicRational() = default;

    DyadicRational(Integer numerator, std::size_t exponent)
        : numerator_(std::move(numerator)), exponent_(exponent) {
        if (numerator_ < 0 || numerator_ > pow2(exponent_)) {
            throw OutOfRange(numerator_.str() + "/2^" + std::to_string(exponent_), "outside [0,1]");
        }
        normalize();
    }

    static DyadicRational zero() { return {}; }
    static DyadicRational one() { return DyadicRational(1, 0); }

    /// Value of a finite digit string 0.d1d2...dn.
    static DyadicRational from_digits(const BinaryWord& digits) {
        Integer num = 0;
        for (std::size_t i = 0; i < digits.size(); ++i) num = (num << 1) + digits[i];
        return DyadicRational(num, digits.size());
    }

    static std::optional<DyadicRational> from_rational(const Rational& r) {
        const Integer& den = boost::multiprecision::denominator(r);
        if (den <= 0 || (den & (den - 1)) != 0) return std::nullopt;
        std::size_t e = boost::multiprecision::msb(den);
        const Integer& num = boost::multiprecision::numerator(r);
        if (num < 0 || num > den) return std::nullopt;
        return DyadicRational(num, e);
    }

    /// Parses "a/2^n" (unnormalized numerators allowed) or the bare integers 0 and 1.
    static DyadicRational parse(std::string_view text);

    const Integer& numerator() const noexcept { return numerator_; }
    std::size_t exponent() const noexcept { return exponent_; }
    bool is_zero() const { return numerator_ == 0; }
    bool is_one() const { return exponent_ == 0 && numerator_ == 1; }

    Rational to_rational() const { return Rational(numerator_, pow2(exponent_)); }

    /// Finite binary expansion 0.d1...dn with n = exponent. The point 1 has no
    /// fractional digits and returns the empty word.
    BinaryWord digits() const {
        BinaryWord w;
        if (is_one()) return w;
        for (std::size_t i = exponent_; i-- > 0;) w.push_back(bit_test(numerator_, i) ? 1 : 0);
        return w;
    }

    std::string to_string() const { return numerator_.str() + "/2^" + std::to_string(exponent_); }

    friend bool operator==(const DyadicRational&, const DyadicRational&) = default;
    friend std::strong_ordering operator<=>(const DyadicRational& a, const DyadicRational& b) {
        Integer lhs = a.numerator_ << b.exponent_;
        Integer rhs = b.numerator_ << a.exponent_;
        if (lhs < rhs) return std::strong_ordering::less;
        if (lhs > rhs) return std::strong_ordering::greater;
        return std::strong_ordering::equal;
    }
    friend std::ostream& operator<<(std::ostream& os, const DyadicRational& d) { return os << d.to_string(); }

private:
    void normalize() {
        if (numerator_ == 0) {
            exponent_ = 0;
            return;
        }
        while (exponent_ > 0 && !bit_test(numerator_, 0)) {
            numerator_ >>= 1;
            --exponent_;
        }
    }

    Integer numerator_ = 0;
    std::size_t exponent_ = 0;
};

/// Node [index·2^-level, (index+1)·2^-level] of the dyadic branching system.
class DyadicInterval {
public:
    DyadicInterval() = default;
    DyadicInterval(std::size_t level, Integer index) : level_(level), index_(std::move(index)) {
        if (index_ < 0 || index_ >= pow2(level_)) {
            throw OutOfRange(index_.str() + "@" + std::to_string(level_), "interval index");
        }
    }

    std::size_t level() const noexcept { return level_; }
    const Integer& index() const noexcept { return index_; }

    DyadicRational lo() const { return DyadicRational(index_, level_); }
    DyadicRational hi() const { return DyadicRational(index_ + 1, level_); }

    bool contains(const Rational& x) const {
        Rational scaled = x * Rational(pow2(level_));
        return scaled >= Rational(index_) && scaled <= Rational(index_ + 1);
    }
    /// Closed intervals meet, touching endpoints included.
    bool meets(const Rational& lo, const Rational& hi) const {
        return lo <= hi && hi >= lo_rational() && lo <= hi_rational();
    }
    Rational lo_rational() const { return Rational(index_, pow2(level_)); }
    Rational hi_rational() const { return Rational(index_ + 1, pow2(level_)); }

    /// "[a/2^n, b/2^n]" with both endpoints at this interval's level.
    std::string to_string() const {
        std::string n = std::to_string(level_);
        return "[" + index_.str() + "/2^" + n + ", " + Integer(index_ + 1).str() + "/2^" + n + "]";
    }
    static DyadicInterval parse(std::string_view text);

    friend bool operator==(const DyadicInterval&, const DyadicInterval&) = default;
    friend auto operator<=>(const DyadicInterval& a, const DyadicInterval& b) {
        if (auto c = a.level_ <=> b.level_; c != 0) return c;
        if (a.index_ < b.index_) return std::strong_ordering::less;
        if (a.index_ > b.index_) return std::strong_ordering::greater;
        return std::strong_ordering::equal;
    }
    friend std::ostream& operator<<(std::ostream& os, const DyadicInterval& iv) { return os << iv.to_string(); }

private:
    std::size_t level_ = 0;
    Integer index_ = 0;
};

inline DyadicInterval word_to_interval(const BinaryWord& w) {
    Integer index = 0;
    for (std::size_t i = 0; i < w.size(); ++i) index = (index << 1) + w[i];
    return DyadicInterval(w.size(), index);
}

inline BinaryWord interval_to_word(const DyadicInterval& iv) {
    BinaryWord w;
    for (std::size_t i = iv.level(); i-- > 0;) w.push_back(bit_test(iv.index(), i) ? 1 : 0);
    return w;
}

/// Eventually periodic binary expansion 0.pre(per)(per)...; `period` is never empty.
struct Expansion {
    BinaryWord preperiod;
    BinaryWord period;

    friend bool operator==(const Expansion&, const Expansion&) = default;

    /// First n digits.
    BinaryWord digits(std::size_t n) const {
        BinaryWord out = preperiod.prefix(n);
        while (out.size() < n) out.push_back(period[(out.size() - preperiod.size()) % period.size()]);
        return out;
    }

    Rational value() const {
        Integer pre = 0;
        for (std::size_t i = 0; i < preperiod.size(); ++i) pre = (pre << 1) + preperiod[i];
        Integer per = 0;
        for (std::size_t i = 0; i < period.size(); ++i) per = (per << 1) + period[i];
        Rational tail(per, pow2(period.size()) - 1);
        return (Rational(pre) + tail) / Rational(pow2(preperiod.size()));
    }
};

/// Canonical expansion of a rational in [0,1]: minimal preperiod and period,
/// finite expansions end in (0), and 1 is (1).
inline Expansion expansion_of(const Rational& x) {
    if (x < 0 || x > 1) throw OutOfRange(x.str(), "outside [0,1]");
    if (x == 1) return {BinaryWord(), BinaryWord("1")};
    Integer num = boost::multiprecision::numerator(x);
    Integer den = boost::multiprecision::denominator(x);
    std::size_t twos = 0;
    Integer odd = den;
    while (!bit_test(odd, 0)) {
        odd >>= 1;
        ++twos;
    }
    Expansion e;
    // Long division in base 2; after the power-of-two part the remainders cycle.
    Integer rem = num;
    for (std::size_t i = 0; i < twos; ++i) {
        rem <<= 1;
        int bit = rem >= den ? 1 : 0;
        if (bit) rem -= den;
        e.preperiod.push_back(bit);
    }
    if (rem == 0) {
        e.period.push_back(0);
        return e;
    }
    Integer start = rem;
    do {
        rem <<= 1;
        int bit = rem >= den ? 1 : 0;
        if (bit) rem -= den;
        e.period.push_back(bit);
    } while (rem != start);
    return e;
}

/// "a/2^n" for dyadic values, otherwise "pre=... per=... value=p/q".
inline std::string format_rational(const Rational& x) {
    if (auto d = DyadicRational::from_rational(x)) return d->to_string();
    Expansion e = expansion_of(x);
    return "pre=" + e.preperiod.str() + " per=" + e.period.str() + " value=" + x.str();
}

/// Σ d_i 2^-i  ↦  Σ d_i 2^-2i. The point 1 is fixed.
inline DyadicRational e_map(const DyadicRational& x) {
    if (x.is_one()) return x;
    BinaryWord d = x.digits();
    const std::size_t n = d.size();
    Integer num = 0;
    for (std::size_t i = 1; i <= n; ++i) {
        if (d[i - 1]) num += pow2(2 * (n - i));
    }
    return DyadicRational(num, 2 * n);
}

/// True iff every odd-numbered digit of the finite expansion is 0.
inline bool in_E(const DyadicRational& x) {
    BinaryWord d = x.digits();
    for (std::size_t i = 0; i < d.size(); i += 2) {
        if (d[i]) return false;
    }
    return true;
}

namespace detail {

inline Integer parse_integer(std::string_view text, std::string_view whole) {
    if (text.empty() || text.size() > 4096) throw MalformedDescription(std::string(whole), "expected integer");
    for (char c : text) {
        if (c < '0' || c > '9') throw MalformedDescription(std::string(whole), "expected integer");
    }
    return Integer(std::string(text));
}

inline std::size_t parse_size(std::string_view text, std::string_view whole) {
    Integer v = parse_integer(text, whole);
    if (v > 4096) throw MalformedDescription(std::string(whole), "exponent too large");
    return static_cast<std::size_t>(v);
}

} // namespace detail

inline DyadicRational DyadicRational::parse(std::string_view text) {
    auto slash = text.find('/');
    if (slash == std::string_view::npos) {
        Integer v = detail::parse_integer(text, text);
        if (v > 1) throw OutOfRange(std::string(text), "outside [0,1]");
        return DyadicRational(v, 0);
    }
    std::string_view num = text.substr(0, slash);
    std::string_view rest = text.substr(slash + 1);
    if (!rest.starts_with("2^")) throw MalformedDescription(std::string(text), "expected a/2^n");
    return DyadicRational(detail::parse_integer(num, text), detail::parse_size(rest.substr(2), text));
}

inline DyadicInterval DyadicInterval::parse(std::string_view text) {
    auto bad = [&] { return MalformedDescription(std::string(text), "expected [a/2^n, b/2^n]"); };
    if (text.size() < 2 || text.front() != '[' || text.back() != ']') throw bad();
    std::string_view body = text.substr(1, text.size() - 2);
    auto comma = body.find(',');
    if (comma == std::string_view::npos) throw bad();
    auto trim = [](std::string_view s) {
        while (!s.empty() && s.front() == ' ') s.remove_prefix(1);
        while (!s.empty() && s.back() == ' ') s.remove_suffix(1);
        return s;
    };
    std::string_view lo = trim(body.substr(0, comma));
    std::string_view hi = trim(body.substr(comma + 1));
    auto split = [&](std::string_view s) {
        auto slash = s.find('/');
        if (slash == std::string_view::npos || !s.substr(slash + 1).starts_with("2^")) throw bad();
        return std::pair{detail::parse_integer(s.substr(0, slash), text),
                         detail::parse_size(s.substr(slash + 3), text)};
    };
    auto [a, n] = split(lo);
    auto [b, m] = split(hi);
    if (n != m || b != a + 1) throw bad();
    return DyadicInterval(n, a);
}

} // namespace cbtree

template <>
struct std::hash<cbtree::BinaryWord> {
    std::size_t operator()(const cbtree::BinaryWord& w) const noexcept { return std::hash<std::string>{}(w.str()); }
};

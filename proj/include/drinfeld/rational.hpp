#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cstdint>
#include <string>

#include "error.hpp"

namespace drinfeld {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

inline Rational make_rational(std::int64_t num, std::int64_t den = 1) {
    if (den == 0) throw division_by_zero();
    return Rational(BigInt(num), BigInt(den));
}

/// Canonical "a/b" text in lowest terms, "a" for integers.
inline std::string to_string(const Rational& x) {
    const BigInt& n = boost::multiprecision::numerator(x);
    const BigInt& d = boost::multiprecision::denominator(x);
    if (d == 1) return n.str();
    return n.str() + "/" + d.str();
}

inline Rational parse_rational(const std::string& text) {
    try {
        auto slash = text.find('/');
        if (slash == std::string::npos) return Rational(BigInt(text));
        BigInt n(text.substr(0, slash));
        BigInt d(text.substr(slash + 1));
        if (d == 0) throw division_by_zero();
        return Rational(n, d);
    } catch (const std::runtime_error&) {
        throw parse_error("malformed rational '" + text + "'");
    }
}

inline BigInt ipow(const BigInt& base, std::uint64_t exp) {
    BigInt result = 1;
    BigInt b = base;
    while (exp) {
        if (exp & 1U) result *= b;
        exp >>= 1U;
        if (exp) b *= b;
    }
    return result;
}

/// Smallest integer n with n >= x.
inline BigInt ceil(const Rational& x) {
    BigInt n = boost::multiprecision::numerator(x);
    const BigInt& d = boost::multiprecision::denominator(x);
    BigInt quot = n / d;  // truncates toward zero
    if (quot * d != n && n > 0) ++quot;
    return quot;
}

inline Rational abs(const Rational& x) { return x < 0 ? Rational(-x) : x; }

}  // namespace drinfeld

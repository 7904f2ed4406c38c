#pragma once

#include <cctype>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "ratfunc.hpp"

namespace drinfeld {

// Text syntax: polynomials are sums of `c*t^k` terms; coefficients are integers
// mod p over prime fields and `[c0,c1,...]` basis vectors over extension
// fields; rational functions are `num/den`. Parentheses, `-` and `^` with an
// integer exponent are accepted on input. The printer emits the canonical form,
// which re-parses to the identical value.

inline std::string to_string(const Field& F, FqElem a) {
    if (F.is_prime_field()) return std::to_string(a.code);
    auto coords = F.coordinates(a);
    std::string s = "[";
    for (std::size_t i = 0; i < coords.size(); ++i) {
        if (i) s += ',';
        s += std::to_string(coords[i]);
    }
    return s + "]";
}

inline std::string to_string(const Poly& f) {
    if (f.is_zero()) return "0";
    const Field& F = *f.field();
    std::string s;
    for (std::size_t k = f.size(); k-- > 0;) {
        FqElem c = f.coeff(k);
        if (c.is_zero()) continue;
        if (!s.empty()) s += '+';
        const bool unit = c == F.one();
        if (k == 0) {
            s += to_string(F, c);
            continue;
        }
        if (!unit) s += to_string(F, c) + "*";
        s += 't';
        if (k > 1) s += "^" + std::to_string(k);
    }
    return s;
}

namespace detail {

inline bool single_term(const Poly& f) {
    std::size_t nonzero = 0;
    for (auto c : f.coefficients()) nonzero += c.is_zero() ? 0 : 1;
    return nonzero <= 1;
}

}  // namespace detail

inline std::string to_string(const RatFunc& x) {
    if (x.is_polynomial()) return to_string(x.num());
    std::string n = to_string(x.num());
    if (!detail::single_term(x.num())) n = "(" + n + ")";
    std::string d = to_string(x.den());
    // A monic single-term denominator is t^k, which binds tighter than '/'.
    if (!detail::single_term(x.den())) d = "(" + d + ")";
    return n + "/" + d;
}

namespace detail {

class Parser {
public:
    Parser(FieldPtr F, std::string_view text) : F_(std::move(F)), s_(text) {}

    RatFunc parse() {
        RatFunc v = expr();
        skip();
        if (pos_ != s_.size()) fail("unexpected '" + std::string(1, s_[pos_]) + "'");
        return v;
    }

private:
    [[noreturn]] void fail(const std::string& msg) const {
        throw parse_error("cannot parse '" + std::string(s_) + "' at offset " + std::to_string(pos_) + ": " + msg);
    }

    void skip() {
        while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    }

    bool eat(char c) {
        skip();
        if (pos_ < s_.size() && s_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    std::int64_t integer() {
        skip();
        const std::size_t start = pos_;
        bool neg = false;
        if (pos_ < s_.size() && (s_[pos_] == '-' || s_[pos_] == '+')) neg = s_[pos_++] == '-';
        std::int64_t v = 0;
        std::size_t digits = 0;
        while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) {
            if (v > (INT64_MAX - 9) / 10) fail("integer too large");
            v = v * 10 + (s_[pos_++] - '0');
            ++digits;
        }
        if (digits == 0) {
            pos_ = start;
            fail("expected an integer");
        }
        return neg ? -v : v;
    }

    RatFunc expr() {
        RatFunc acc = term();
        for (;;) {
            if (eat('+'))
                acc = acc + term();
            else if (eat('-'))
                acc = acc - term();
            else
                return acc;
        }
    }

    RatFunc term() {
        RatFunc acc = unary();
        for (;;) {
            if (eat('*'))
                acc = acc * unary();
            else if (eat('/')) {
                RatFunc d = unary();
                if (d.is_zero()) fail("division by zero");
                acc = acc / d;
            } else
                return acc;
        }
    }

    RatFunc unary() {
        if (eat('-')) return -unary();
        return power();
    }

    RatFunc power() {
        RatFunc base = atom();
        if (eat('^')) {
            std::int64_t n = integer();
            if (n < 0 && base.is_zero()) fail("zero to a negative power");
            return base.pow(n);
        }
        return base;
    }

    RatFunc atom() {
        skip();
        if (pos_ >= s_.size()) fail("unexpected end of input");
        const char c = s_[pos_];
        if (c == '(') {
            ++pos_;
            RatFunc v = expr();
            if (!eat(')')) fail("expected ')'");
            return v;
        }
        if (c == 't') {
            ++pos_;
            return RatFunc::t(F_);
        }
        if (c == '[') {
            ++pos_;
            std::vector<std::int64_t> coords;
            if (!eat(']')) {
                do coords.push_back(integer());
                while (eat(','));
                if (!eat(']')) fail("expected ']'");
            }
            return RatFunc(Poly::constant(F_, F_->from_coordinates(coords)));
        }
        if (std::isdigit(static_cast<unsigned char>(c))) return RatFunc::from_int(F_, integer());
        fail("unexpected '" + std::string(1, c) + "'");
    }

    FieldPtr F_;
    std::string_view s_;
    std::size_t pos_ = 0;
};

}  // namespace detail

inline RatFunc parse_ratfunc(const FieldPtr& F, std::string_view text) { return detail::Parser(F, text).parse(); }

inline Poly parse_poly(const FieldPtr& F, std::string_view text) {
    RatFunc x = parse_ratfunc(F, text);
    if (!x.is_polynomial()) throw parse_error("'" + std::string(text) + "' is not a polynomial");
    return x.num();
}

}  // namespace drinfeld

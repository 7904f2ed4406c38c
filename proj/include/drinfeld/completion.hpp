#pragma once

#include <algorithm>
#include <cstdint>
#include <vector>

#include "places.hpp"

namespace drinfeld {

/// Truncated elements of the completion K_v, written pi^val * (u + O(pi^prec))
/// with u a unit. At infinity the uniformizer is s = 1/t and u is stored as a
/// polynomial in s. A value whose leading digit is lost to cancellation keeps
/// only the bound val >= floor ("unknown" below).
class Completion {
public:
    struct Elem {
        bool known = false;
        std::int64_t val = 0;    // exact valuation when known
        std::int64_t floor = 0;  // absolute precision: val + prec when known
        Poly unit;               // reduced modulo pi^prec
    };

    Completion(Place v, const FieldPtr& F) : v_(std::move(v)), F_(F), pi_(v_.is_infinite() ? Poly::t(F) : v_.pi()) {}

    const Place& place() const noexcept { return v_; }

    Elem from(const RatFunc& x, std::int64_t prec) const {
        if (x.is_zero()) return Elem{false, 0, prec, Poly(F_)};
        Poly a = x.num(), b = x.den();
        std::int64_t e = 0;
        if (v_.is_infinite()) {
            e = static_cast<std::int64_t>(b.deg()) - static_cast<std::int64_t>(a.deg());
            a = reversed(a);
            b = reversed(b);
        } else {
            auto [ea, ra] = strip_factor(a, pi_);
            auto [eb, rb] = strip_factor(b, pi_);
            e = ea - eb;
            a = std::move(ra);
            b = std::move(rb);
        }
        const Poly m = modulus(prec);
        const auto inv = xgcd(b % m, m);
        return Elem{true, e, e + prec, (a * inv.r1.scaled(F_->inv(inv.g.leading()))) % m};
    }

    Elem mul(const Elem& x, const Elem& y) const {
        if (!x.known || !y.known) {
            const std::int64_t lx = x.known ? x.val : x.floor, ly = y.known ? y.val : y.floor;
            return Elem{false, 0, lx + ly, Poly(F_)};
        }
        const std::int64_t prec = std::min(x.floor - x.val, y.floor - y.val);
        return Elem{true, x.val + y.val, x.val + y.val + prec, (x.unit * y.unit) % modulus(prec)};
    }

    Elem add(const Elem& x, const Elem& y) const {
        const std::int64_t floor = std::min(x.floor, y.floor);
        std::int64_t low = floor;
        if (x.known) low = std::min(low, x.val);
        if (y.known) low = std::min(low, y.val);
        if (low >= floor) return Elem{false, 0, floor, Poly(F_)};
        const Poly m = modulus(floor - low);
        Poly w(F_);
        if (x.known && x.val < floor) w += x.unit * pow(pi_, static_cast<std::uint64_t>(x.val - low));
        if (y.known && y.val < floor) w += y.unit * pow(pi_, static_cast<std::uint64_t>(y.val - low));
        w = w % m;
        if (w.is_zero()) return Elem{false, 0, floor, Poly(F_)};
        auto [k, rest] = strip_factor(w, pi_);
        const std::int64_t val = low + k;
        return Elem{true, val, floor, rest % modulus(floor - val)};
    }

    /// x^(q^i) for x in F_q[t]-expansions: coefficients are Frobenius-fixed.
    Elem frobenius(const Elem& x, std::uint64_t qi) const {
        const auto n = static_cast<std::int64_t>(qi);
        if (!x.known) return Elem{false, 0, x.floor * n, Poly(F_)};
        const std::int64_t prec = x.floor - x.val;
        return Elem{true, x.val * n, x.val * n + prec, x.unit.inflated(qi) % modulus(prec)};
    }

    Rational log_abs(const Elem& x) const { return Rational(-x.val * v_.degree()); }

private:
    static Poly reversed(const Poly& a) {
        std::vector<FqElem> c = a.coefficients();
        std::reverse(c.begin(), c.end());
        return Poly(a.field(), std::move(c));
    }

    Poly modulus(std::int64_t prec) const { return pow(pi_, static_cast<std::uint64_t>(std::max<std::int64_t>(prec, 1))); }

    Place v_;
    FieldPtr F_;
    Poly pi_;
};

}  // namespace drinfeld

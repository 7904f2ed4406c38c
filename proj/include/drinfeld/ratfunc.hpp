#pragma once

#include <compare>
#include <cstdint>
#include <utility>
#include <vector>

#include "poly.hpp"

namespace drinfeld {

/// Element of F_q(t) in lowest terms with monic denominator; zero is 0/1.
class RatFunc {
public:
    explicit RatFunc(FieldPtr field) : num_(field), den_(Poly::one(field)) {}

    RatFunc(Poly num) : num_(std::move(num)), den_(Poly::one(num_.field())) {}  // NOLINT: implicit from Poly

    RatFunc(Poly num, Poly den) : num_(std::move(num)), den_(std::move(den)) {
        require_same_field(num_.field(), den_.field());
        if (den_.is_zero()) throw division_by_zero();
        canonicalize();
    }

    static RatFunc from_int(const FieldPtr& F, std::int64_t n) { return RatFunc(Poly::from_int(F, n)); }
    static RatFunc t(const FieldPtr& F) { return RatFunc(Poly::t(F)); }

    const FieldPtr& field() const noexcept { return num_.field(); }
    const Poly& num() const noexcept { return num_; }
    const Poly& den() const noexcept { return den_; }

    bool is_zero() const noexcept { return num_.is_zero(); }
    bool is_polynomial() const noexcept { return den_.is_one(); }
    bool is_constant() const noexcept { return den_.is_one() && num_.is_constant(); }
    bool is_one() const noexcept { return den_.is_one() && num_.is_one(); }

    RatFunc operator-() const {
        RatFunc out(*this);
        out.num_ = -out.num_;
        return out;
    }

    friend RatFunc operator+(const RatFunc& a, const RatFunc& b) { return combine(a, b, false); }
    friend RatFunc operator-(const RatFunc& a, const RatFunc& b) { return combine(a, b, true); }

    friend RatFunc operator*(const RatFunc& a, const RatFunc& b) {
        require_same_field(a.field(), b.field());
        if (a.is_zero() || b.is_zero()) return RatFunc(a.field());
        if (a.is_polynomial() && b.is_polynomial()) return RatFunc(a.num_ * b.num_);
        Poly g1 = gcd(a.num_, b.den_);
        Poly g2 = gcd(b.num_, a.den_);
        RatFunc out(a.field());
        out.num_ = exact_div(a.num_, g1) * exact_div(b.num_, g2);
        out.den_ = exact_div(a.den_, g2) * exact_div(b.den_, g1);
        return out;
    }

    RatFunc inverse() const {
        if (is_zero()) throw division_by_zero();
        return RatFunc(den_, num_);
    }

    friend RatFunc operator/(const RatFunc& a, const RatFunc& b) { return a * b.inverse(); }

    RatFunc& operator+=(const RatFunc& o) { return *this = *this + o; }
    RatFunc& operator-=(const RatFunc& o) { return *this = *this - o; }
    RatFunc& operator*=(const RatFunc& o) { return *this = *this * o; }

    RatFunc scaled(FqElem c) const {
        RatFunc out(*this);
        out.num_ = num_.scaled(c);
        return out;
    }

    /// x^{q^k}: substitute t -> t^{q^k} in numerator and denominator. Coprimality
    /// and monicity are preserved, so no reduction is needed.
    RatFunc frobenius(std::uint64_t k = 1) const {
        std::uint64_t step = 1;
        for (std::uint64_t i = 0; i < k; ++i) step *= field()->q();
        RatFunc out(field());
        out.num_ = num_.inflated(step);
        out.den_ = den_.inflated(step);
        return out;
    }

    RatFunc pow(std::int64_t n) const {
        if (n < 0) return inverse().pow(-n);
        RatFunc out(field());
        out.num_ = drinfeld::pow(num_, static_cast<std::uint64_t>(n));
        out.den_ = drinfeld::pow(den_, static_cast<std::uint64_t>(n));
        return out;
    }

    friend bool operator==(const RatFunc& a, const RatFunc& b) noexcept { return a.num_ == b.num_ && a.den_ == b.den_; }

    friend std::strong_ordering operator<=>(const RatFunc& a, const RatFunc& b) noexcept {
        if (auto c = a.num_ <=> b.num_; c != 0) return c;
        return a.den_ <=> b.den_;
    }

private:
    static RatFunc combine(const RatFunc& a, const RatFunc& b, bool subtract) {
        require_same_field(a.field(), b.field());
        const Poly& bn = b.num_;
        if (a.is_polynomial() && b.is_polynomial()) return RatFunc(subtract ? a.num_ - bn : a.num_ + bn);
        if (a.den_ == b.den_) {
            Poly n = subtract ? a.num_ - bn : a.num_ + bn;
            return RatFunc(std::move(n), a.den_);
        }
        Poly g = gcd(a.den_, b.den_);
        if (g.is_one()) {
            // gcd(ad + cb, bd) = 1 when both inputs are reduced and b, d are coprime.
            RatFunc out(a.field());
            Poly left = a.num_ * b.den_;
            Poly right = bn * a.den_;
            out.num_ = subtract ? left - right : left + right;
            out.den_ = a.den_ * b.den_;
            if (out.num_.is_zero()) out.den_ = Poly::one(a.field());
            return out;
        }
        Poly ad = exact_div(a.den_, g), bd = exact_div(b.den_, g);
        Poly left = a.num_ * bd;
        Poly right = bn * ad;
        return RatFunc(subtract ? left - right : left + right, ad * b.den_);
    }

    void canonicalize() {
        if (num_.is_zero()) {
            den_ = Poly::one(num_.field());
            return;
        }
        if (!den_.is_one()) {
            Poly g = gcd(num_, den_);
            if (!g.is_one()) {
                num_ = exact_div(num_, g);
                den_ = exact_div(den_, g);
            }
        }
        if (!den_.is_monic()) {
            FqElem inv = field()->inv(den_.leading());
            num_ = num_.scaled(inv);
            den_ = den_.scaled(inv);
        }
    }

    Poly num_;
    Poly den_;
};

/// Polynomial in X over F_q(t) with sparse support, terms by strictly increasing exponent.
/// Zero coefficients are never stored.
class SparsePoly {
public:
    struct Term {
        std::uint64_t exponent;
        RatFunc coeff;
    };

    explicit SparsePoly(FieldPtr field) : field_(std::move(field)) {}

    /// Add c * X^k into the polynomial.
    void add_term(std::uint64_t k, const RatFunc& c) {
        require_same_field(field_, c.field());
        auto it = std::lower_bound(terms_.begin(), terms_.end(), k,
                                   [](const Term& t, std::uint64_t e) { return t.exponent < e; });
        if (it != terms_.end() && it->exponent == k) {
            it->coeff += c;
            if (it->coeff.is_zero()) terms_.erase(it);
        } else if (!c.is_zero()) {
            terms_.insert(it, Term{k, c});
        }
    }

    const FieldPtr& field() const noexcept { return field_; }
    const std::vector<Term>& terms() const noexcept { return terms_; }
    bool is_zero() const noexcept { return terms_.empty(); }
    std::uint64_t degree() const {
        if (terms_.empty()) throw precondition_error("degree of the zero polynomial is minus infinity");
        return terms_.back().exponent;
    }
    const RatFunc& leading() const { return terms_.back().coeff; }

    RatFunc coeff(std::uint64_t k) const {
        for (const auto& t : terms_)
            if (t.exponent == k) return t.coeff;
        return RatFunc(field_);
    }

    RatFunc eval(const RatFunc& x) const {
        RatFunc acc(field_);
        std::uint64_t prev = 0;
        RatFunc power = RatFunc::from_int(field_, 1);
        for (const auto& t : terms_) {
            power *= x.pow(static_cast<std::int64_t>(t.exponent - prev));
            prev = t.exponent;
            acc += t.coeff * power;
        }
        return acc;
    }

    /// F(X + shift), expanded densely.
    SparsePoly shifted(const RatFunc& shift) const {
        // Horner in the dense representation.
        std::vector<RatFunc> dense;
        if (terms_.empty()) return *this;
        dense.assign(terms_.back().exponent + 1, RatFunc(field_));
        for (const auto& t : terms_) dense[t.exponent] = t.coeff;
        std::vector<RatFunc> acc;
        for (std::size_t i = dense.size(); i-- > 0;) {
            // acc = acc * (X + shift) + dense[i]
            std::vector<RatFunc> next(acc.size() + 1, RatFunc(field_));
            for (std::size_t j = 0; j < acc.size(); ++j) {
                next[j + 1] += acc[j];
                next[j] += acc[j] * shift;
            }
            next[0] += dense[i];
            acc = std::move(next);
        }
        SparsePoly out(field_);
        for (std::size_t j = 0; j < acc.size(); ++j)
            if (!acc[j].is_zero()) out.terms_.push_back({j, acc[j]});
        return out;
    }

    friend bool operator==(const SparsePoly& a, const SparsePoly& b) {
        if (a.terms_.size() != b.terms_.size()) return false;
        for (std::size_t i = 0; i < a.terms_.size(); ++i)
            if (a.terms_[i].exponent != b.terms_[i].exponent || !(a.terms_[i].coeff == b.terms_[i].coeff)) return false;
        return true;
    }

private:
    FieldPtr field_;
    std::vector<Term> terms_;
};

}  // namespace drinfeld

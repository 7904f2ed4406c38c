#pragma once

#include <algorithm>
#include <cassert>
#include <compare>
#include <cstdint>
#include <limits>
#include <utility>
#include <vector>

#include "field.hpp"

namespace drinfeld {

/// Degree of a polynomial. The zero polynomial has degree minus infinity,
/// which is a distinct state rather than a sentinel integer.
class Degree {
public:
    constexpr Degree() noexcept = default;  // minus infinity
    constexpr explicit Degree(std::int64_t d) noexcept : value_(d), finite_(true) {}

    static constexpr Degree minus_infinity() noexcept { return Degree(); }

    constexpr bool is_minus_infinity() const noexcept { return !finite_; }

    std::int64_t value() const {
        if (!finite_) throw precondition_error("degree of the zero polynomial is minus infinity");
        return value_;
    }

    friend constexpr bool operator==(Degree a, Degree b) noexcept {
        return a.finite_ == b.finite_ && (!a.finite_ || a.value_ == b.value_);
    }
    friend constexpr std::strong_ordering operator<=>(Degree a, Degree b) noexcept {
        if (!a.finite_ || !b.finite_) return a.finite_ <=> b.finite_;
        return a.value_ <=> b.value_;
    }

private:
    std::int64_t value_ = 0;
    bool finite_ = false;
};

/// Dense univariate polynomial over F_q, coefficients lowest degree first.
class Poly {
public:
    explicit Poly(FieldPtr field) : field_(std::move(field)) {}

    Poly(FieldPtr field, std::vector<FqElem> coeffs) : field_(std::move(field)), c_(std::move(coeffs)) { trim(); }

    static Poly constant(const FieldPtr& f, FqElem c) { return Poly(f, {c}); }
    static Poly from_int(const FieldPtr& f, std::int64_t n) { return Poly(f, {f->from_int(n)}); }
    static Poly one(const FieldPtr& f) { return from_int(f, 1); }
    static Poly t(const FieldPtr& f) { return monomial(f, f->one(), 1); }

    static Poly monomial(const FieldPtr& f, FqElem c, std::size_t k) {
        std::vector<FqElem> v(k + 1);
        v[k] = c;
        return Poly(f, std::move(v));
    }

    /// Build from small integer coefficients (low degree first); prime-subfield images.
    static Poly from_ints(const FieldPtr& f, std::initializer_list<std::int64_t> coeffs) {
        std::vector<FqElem> v;
        v.reserve(coeffs.size());
        for (auto c : coeffs) v.push_back(f->from_int(c));
        return Poly(f, std::move(v));
    }

    const FieldPtr& field() const noexcept { return field_; }
    const std::vector<FqElem>& coefficients() const noexcept { return c_; }

    bool is_zero() const noexcept { return c_.empty(); }
    bool is_constant() const noexcept { return c_.size() <= 1; }
    bool is_one() const noexcept { return c_.size() == 1 && c_[0] == field_->one(); }
    bool is_monic() const noexcept { return !c_.empty() && c_.back() == field_->one(); }

    Degree degree() const noexcept {
        return c_.empty() ? Degree::minus_infinity() : Degree(static_cast<std::int64_t>(c_.size()) - 1);
    }
    /// Degree as an integer; only for nonzero polynomials.
    std::size_t deg() const {
        if (c_.empty()) throw precondition_error("degree of the zero polynomial is minus infinity");
        return c_.size() - 1;
    }
    std::size_t size() const noexcept { return c_.size(); }

    FqElem coeff(std::size_t k) const noexcept { return k < c_.size() ? c_[k] : FqElem{}; }
    FqElem leading() const noexcept { return c_.empty() ? FqElem{} : c_.back(); }

    std::size_t trailing_zeros() const noexcept {
        std::size_t k = 0;
        while (k < c_.size() && c_[k].is_zero()) ++k;
        return k;
    }

    Poly operator-() const {
        Poly out(*this);
        for (auto& x : out.c_) x = field_->neg(x);
        return out;
    }

    Poly& operator+=(const Poly& o) {
        require_same_field(field_, o.field_);
        if (o.c_.size() > c_.size()) c_.resize(o.c_.size());
        for (std::size_t i = 0; i < o.c_.size(); ++i) c_[i] = field_->add(c_[i], o.c_[i]);
        trim();
        return *this;
    }

    Poly& operator-=(const Poly& o) {
        require_same_field(field_, o.field_);
        if (o.c_.size() > c_.size()) c_.resize(o.c_.size());
        for (std::size_t i = 0; i < o.c_.size(); ++i) c_[i] = field_->sub(c_[i], o.c_[i]);
        trim();
        return *this;
    }

    Poly& operator*=(const Poly& o) { return *this = *this * o; }

    friend Poly operator+(Poly a, const Poly& b) { return a += b; }
    friend Poly operator-(Poly a, const Poly& b) { return a -= b; }

    friend Poly operator*(const Poly& a, const Poly& b) {
        require_same_field(a.field_, b.field_);
        if (a.is_zero() || b.is_zero()) return Poly(a.field_);
        return Poly(a.field_, multiply(*a.field_, a.c_, b.c_));
    }

    Poly scaled(FqElem s) const {
        if (s.is_zero()) return Poly(field_);
        Poly out(*this);
        for (auto& x : out.c_) x = field_->mul(x, s);
        return out;
    }

    Poly monic() const {
        if (c_.empty()) return *this;
        return scaled(field_->inv(c_.back()));
    }

    /// Multiply by t^k.
    Poly shifted(std::size_t k) const {
        if (c_.empty() || k == 0) return *this;
        std::vector<FqElem> v(k + c_.size());
        std::copy(c_.begin(), c_.end(), v.begin() + static_cast<std::ptrdiff_t>(k));
        return Poly(field_, std::move(v));
    }

    /// Substitute t -> t^k. For k = q this is the q-th power map (coefficients of F_q are Frobenius-fixed).
    Poly inflated(std::uint64_t k) const {
        if (c_.size() <= 1 || k == 1) return *this;
        std::vector<FqElem> v((c_.size() - 1) * k + 1);
        for (std::size_t i = 0; i < c_.size(); ++i) v[i * k] = c_[i];
        return Poly(field_, std::move(v));
    }

    Poly derivative() const {
        if (c_.size() <= 1) return Poly(field_);
        std::vector<FqElem> v(c_.size() - 1);
        for (std::size_t i = 1; i < c_.size(); ++i)
            v[i - 1] = field_->mul(c_[i], field_->from_int(static_cast<std::int64_t>(i % field_->p())));
        return Poly(field_, std::move(v));
    }

    FqElem eval(FqElem x) const noexcept {
        FqElem acc{};
        for (std::size_t i = c_.size(); i-- > 0;) acc = field_->add(field_->mul(acc, x), c_[i]);
        return acc;
    }

    friend bool operator==(const Poly& a, const Poly& b) noexcept {
        return a.c_ == b.c_ && (a.field_ == b.field_ || *a.field_ == *b.field_);
    }

    /// Total order: degree first, then coefficients from the top down. Used for
    /// canonical place ordering and as a map key.
    friend std::strong_ordering operator<=>(const Poly& a, const Poly& b) noexcept {
        if (auto c = a.c_.size() <=> b.c_.size(); c != 0) return c;
        for (std::size_t i = a.c_.size(); i-- > 0;)
            if (auto c = a.c_[i] <=> b.c_[i]; c != 0) return c;
        return std::strong_ordering::equal;
    }

    static std::vector<FqElem> multiply(const Field& F, const std::vector<FqElem>& a, const std::vector<FqElem>& b);

private:
    void trim() noexcept {
        while (!c_.empty() && c_.back().is_zero()) c_.pop_back();
    }

    FieldPtr field_;
    std::vector<FqElem> c_;
};

namespace detail {

inline constexpr std::size_t karatsuba_cutoff = 48;

inline void schoolbook_prime(std::uint32_t p, const FqElem* a, std::size_t na, const FqElem* b, std::size_t nb,
                             FqElem* out) {
    // Products are accumulated unreduced while they provably fit in 64 bits.
    const std::uint64_t pm1 = p - 1;
    const std::uint64_t sq = pm1 * pm1;
    const std::uint64_t batch = sq == 0 ? std::numeric_limits<std::uint64_t>::max()
                                        : std::max<std::uint64_t>(1, (std::numeric_limits<std::uint64_t>::max() - pm1) / sq);
    const std::size_t n = na + nb - 1;
    for (std::size_t k = 0; k < n; ++k) {
        const std::size_t lo = k >= nb ? k - nb + 1 : 0;
        const std::size_t hi = std::min(k, na - 1);
        std::uint64_t acc = out[k].code;
        std::uint64_t pending = 0;
        for (std::size_t i = lo; i <= hi; ++i) {
            acc += std::uint64_t{a[i].code} * b[k - i].code;
            if (++pending == batch) {
                acc %= p;
                pending = 0;
            }
        }
        out[k].code = static_cast<std::uint32_t>(acc % p);
    }
}

inline void schoolbook_generic(const Field& F, const FqElem* a, std::size_t na, const FqElem* b, std::size_t nb,
                               FqElem* out) {
    for (std::size_t i = 0; i < na; ++i) {
        if (a[i].is_zero()) continue;
        for (std::size_t j = 0; j < nb; ++j) out[i + j] = F.add(out[i + j], F.mul(a[i], b[j]));
    }
}

// out[0 .. na+nb-1) += a*b
inline void karatsuba(const Field& F, const FqElem* a, std::size_t na, const FqElem* b, std::size_t nb, FqElem* out) {
    if (na == 0 || nb == 0) return;
    if (std::min(na, nb) < karatsuba_cutoff) {
        if (F.is_prime_field())
            schoolbook_prime(F.p(), a, na, b, nb, out);
        else
            schoolbook_generic(F, a, na, b, nb, out);
        return;
    }
    if (na != nb) {
        // Unbalanced: chop the longer operand into blocks of the shorter length.
        const FqElem* big = na > nb ? a : b;
        const FqElem* small = na > nb ? b : a;
        const std::size_t nbig = std::max(na, nb), nsmall = std::min(na, nb);
        for (std::size_t off = 0; off < nbig; off += nsmall) {
            const std::size_t len = std::min(nsmall, nbig - off);
            karatsuba(F, big + off, len, small, nsmall, out + off);
        }
        return;
    }
    const std::size_t n = na, h = n / 2, hh = n - h;
    // a = a0 + x^h a1, b = b0 + x^h b1
    std::vector<FqElem> z0(2 * h - 1), z2(2 * hh - 1), sa(hh), sb(hh), z1(2 * hh - 1);
    karatsuba(F, a, h, b, h, z0.data());
    karatsuba(F, a + h, hh, b + h, hh, z2.data());
    for (std::size_t i = 0; i < hh; ++i) {
        sa[i] = i < h ? F.add(a[i], a[h + i]) : a[h + i];
        sb[i] = i < h ? F.add(b[i], b[h + i]) : b[h + i];
    }
    karatsuba(F, sa.data(), hh, sb.data(), hh, z1.data());
    for (std::size_t i = 0; i < z0.size(); ++i) z1[i] = F.sub(z1[i], z0[i]);
    for (std::size_t i = 0; i < z2.size(); ++i) z1[i] = F.sub(z1[i], z2[i]);
    for (std::size_t i = 0; i < z0.size(); ++i) out[i] = F.add(out[i], z0[i]);
    for (std::size_t i = 0; i < z1.size(); ++i) out[h + i] = F.add(out[h + i], z1[i]);
    for (std::size_t i = 0; i < z2.size(); ++i) out[2 * h + i] = F.add(out[2 * h + i], z2[i]);
}

}  // namespace detail

inline std::vector<FqElem> Poly::multiply(const Field& F, const std::vector<FqElem>& a, const std::vector<FqElem>& b) {
    std::vector<FqElem> out(a.size() + b.size() - 1);
    detail::karatsuba(F, a.data(), a.size(), b.data(), b.size(), out.data());
    return out;
}

struct DivMod {
    Poly quotient;
    Poly remainder;
};

inline DivMod divmod(const Poly& a, const Poly& b) {
    require_same_field(a.field(), b.field());
    if (b.is_zero()) throw division_by_zero();
    const Field& F = *a.field();
    if (a.size() < b.size()) return {Poly(a.field()), a};
    std::vector<FqElem> r = a.coefficients();
    const auto& bc = b.coefficients();
    const std::size_t db = bc.size() - 1;
    std::vector<FqElem> quot(r.size() - db);
    const FqElem lead_inv = F.inv(bc.back());
    const bool monic = bc.back() == F.one();
    if (F.is_prime_field() && monic) {
        const std::uint32_t p = F.p();
        for (std::size_t k = r.size(); k-- > db;) {
            const std::uint32_t coef = r[k].code;
            quot[k - db].code = coef;
            if (coef == 0) continue;
            const std::uint64_t m = p - coef;
            FqElem* base = r.data() + (k - db);
            for (std::size_t i = 0; i < db; ++i)
                base[i].code = static_cast<std::uint32_t>((base[i].code + m * bc[i].code) % p);
            r[k].code = 0;
        }
    } else {
        for (std::size_t k = r.size(); k-- > db;) {
            FqElem coef = monic ? r[k] : F.mul(r[k], lead_inv);
            quot[k - db] = coef;
            if (coef.is_zero()) continue;
            FqElem m = F.neg(coef);
            for (std::size_t i = 0; i < db; ++i) r[k - db + i] = F.add(r[k - db + i], F.mul(m, bc[i]));
            r[k] = FqElem{};
        }
    }
    r.resize(db);
    return {Poly(a.field(), std::move(quot)), Poly(a.field(), std::move(r))};
}

inline Poly operator/(const Poly& a, const Poly& b) { return divmod(a, b).quotient; }
inline Poly operator%(const Poly& a, const Poly& b) { return divmod(a, b).remainder; }

/// Quotient a / b, which must be exact.
inline Poly exact_div(const Poly& a, const Poly& b) {
    auto [q, r] = divmod(a, b);
    if (!r.is_zero()) throw precondition_error("polynomial division is not exact");
    return q;
}

inline bool divides(const Poly& d, const Poly& a) { return (a % d).is_zero(); }

/// Monic gcd; gcd(0, 0) = 0.
inline Poly gcd(Poly a, Poly b) {
    require_same_field(a.field(), b.field());
    while (!b.is_zero()) {
        Poly r = a % b;
        a = std::move(b);
        b = std::move(r);
    }
    return a.monic();
}

struct Xgcd {
    Poly g;   // monic gcd
    Poly r1;  // r1 * a + r2 * b == g
    Poly r2;
};

inline Xgcd xgcd(const Poly& a, const Poly& b) {
    require_same_field(a.field(), b.field());
    if (a.is_zero() && b.is_zero()) throw precondition_error("xgcd of two zero polynomials");
    const FieldPtr& F = a.field();
    Poly r0 = a, r1 = b;
    Poly s0 = Poly::one(F), s1(F);
    Poly u0(F), u1 = Poly::one(F);
    while (!r1.is_zero()) {
        auto [q, r] = divmod(r0, r1);
        r0 = std::exchange(r1, std::move(r));
        s0 = std::exchange(s1, s0 - q * s1);
        u0 = std::exchange(u1, u0 - q * u1);
    }
    FqElem inv = F->inv(r0.leading());
    return {r0.scaled(inv), s0.scaled(inv), u0.scaled(inv)};
}

inline Poly mulmod(const Poly& a, const Poly& b, const Poly& m) { return (a * b) % m; }

inline Poly powmod(Poly base, std::uint64_t n, const Poly& m) {
    Poly result = Poly::one(base.field()) % m;
    base = base % m;
    while (n) {
        if (n & 1U) result = mulmod(result, base, m);
        n >>= 1U;
        if (n) base = mulmod(base, base, m);
    }
    return result;
}

inline Poly pow(Poly base, std::uint64_t n) {
    Poly result = Poly::one(base.field());
    while (n) {
        if (n & 1U) result *= base;
        n >>= 1U;
        if (n) base *= base;
    }
    return result;
}

/// Compose a(b(t)).
inline Poly compose(const Poly& a, const Poly& b) {
    Poly acc(a.field());
    for (std::size_t i = a.size(); i-- > 0;) acc = acc * b + Poly::constant(a.field(), a.coeff(i));
    return acc;
}

/// Multiplicity of the (nonconstant) factor f in a, and the cofactor.
inline std::pair<std::int64_t, Poly> strip_factor(Poly a, const Poly& f) {
    if (a.is_zero()) throw infinite_valuation();
    if (f.is_constant()) throw precondition_error("cannot strip a constant factor");
    std::int64_t k = 0;
    // Fast path for f = t.
    if (f.size() == 2 && f.coeff(0).is_zero()) {
        std::size_t z = a.trailing_zeros();
        if (z == 0) return {0, std::move(a)};
        std::vector<FqElem> v(a.coefficients().begin() + static_cast<std::ptrdiff_t>(z), a.coefficients().end());
        return {static_cast<std::int64_t>(z), Poly(a.field(), std::move(v))};
    }
    while (a.size() >= f.size()) {
        auto [q, r] = divmod(a, f);
        if (!r.is_zero()) break;
        a = std::move(q);
        ++k;
    }
    return {k, std::move(a)};
}

}  // namespace drinfeld

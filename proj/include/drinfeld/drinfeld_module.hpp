#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "places.hpp"

namespace drinfeld {

/// Element c_0 + c_1 tau + ... + c_m tau^m of F_q(t){tau}, with tau c = c^q tau.
class TwistedPoly {
public:
    explicit TwistedPoly(FieldPtr field) : field_(std::move(field)) {}

    TwistedPoly(FieldPtr field, std::vector<RatFunc> coeffs) : field_(std::move(field)), c_(std::move(coeffs)) {
        for (const auto& c : c_) require_same_field(field_, c.field());
        trim();
    }

    static TwistedPoly scalar(const RatFunc& c) { return TwistedPoly(c.field(), {c}); }
    static TwistedPoly identity(const FieldPtr& F) { return scalar(RatFunc::from_int(F, 1)); }
    static TwistedPoly tau(const FieldPtr& F) { return TwistedPoly(F, {RatFunc(F), RatFunc::from_int(F, 1)}); }

    const FieldPtr& field() const noexcept { return field_; }
    const std::vector<RatFunc>& coefficients() const noexcept { return c_; }
    bool is_zero() const noexcept { return c_.empty(); }

    /// tau-degree; minus infinity for zero.
    Degree degree() const noexcept {
        return c_.empty() ? Degree::minus_infinity() : Degree(static_cast<std::int64_t>(c_.size()) - 1);
    }
    RatFunc coeff(std::size_t i) const { return i < c_.size() ? c_[i] : RatFunc(field_); }
    const RatFunc& leading() const {
        if (c_.empty()) throw precondition_error("zero twisted polynomial has no leading coefficient");
        return c_.back();
    }

    friend TwistedPoly operator+(const TwistedPoly& a, const TwistedPoly& b) {
        require_same_field(a.field_, b.field_);
        std::vector<RatFunc> v(std::max(a.c_.size(), b.c_.size()), RatFunc(a.field_));
        for (std::size_t i = 0; i < a.c_.size(); ++i) v[i] = a.c_[i];
        for (std::size_t i = 0; i < b.c_.size(); ++i) v[i] += b.c_[i];
        return TwistedPoly(a.field_, std::move(v));
    }

    friend TwistedPoly operator-(const TwistedPoly& a, const TwistedPoly& b) {
        std::vector<RatFunc> neg;
        neg.reserve(b.c_.size());
        for (const auto& c : b.c_) neg.push_back(-c);
        return a + TwistedPoly(b.field_, std::move(neg));
    }

    /// Value of the additive polynomial sum c_i x^{q^i}.
    RatFunc apply(const RatFunc& x) const {
        require_same_field(field_, x.field());
        RatFunc acc(field_);
        for (std::size_t i = 0; i < c_.size(); ++i)
            if (!c_[i].is_zero()) acc += c_[i] * x.frobenius(i);
        return acc;
    }

    friend bool operator==(const TwistedPoly& a, const TwistedPoly& b) noexcept { return a.c_ == b.c_; }

private:
    void trim() {
        while (!c_.empty() && c_.back().is_zero()) c_.pop_back();
    }

    FieldPtr field_;
    std::vector<RatFunc> c_;
};

/// Ring multiplication f o g in F_q(t){tau}: (f_i tau^i)(g_k tau^k) = f_i g_k^{q^i} tau^{i+k}.
inline TwistedPoly twisted_compose(const TwistedPoly& f, const TwistedPoly& g) {
    require_same_field(f.field(), g.field());
    if (f.is_zero() || g.is_zero()) return TwistedPoly(f.field());
    const auto& fc = f.coefficients();
    const auto& gc = g.coefficients();
    std::vector<RatFunc> out(fc.size() + gc.size() - 1, RatFunc(f.field()));
    for (std::size_t i = 0; i < fc.size(); ++i) {
        if (fc[i].is_zero()) continue;
        for (std::size_t k = 0; k < gc.size(); ++k)
            if (!gc[k].is_zero()) out[i + k] += fc[i] * gc[k].frobenius(i);
    }
    return TwistedPoly(f.field(), std::move(out));
}

/// The additive polynomial sum c_i X^{q^i}, as a sparse polynomial in X.
inline SparsePoly x_polynomial(const TwistedPoly& f) {
    SparsePoly out(f.field());
    std::uint64_t exponent = 1;
    const std::uint64_t q = f.field()->q();
    for (std::size_t i = 0; i < f.coefficients().size(); ++i) {
        out.add_term(exponent, f.coefficients()[i]);
        if (i + 1 < f.coefficients().size()) {
            if (exponent > UINT64_MAX / q) throw precondition_error("X-polynomial exponent overflows 64 bits");
            exponent *= q;
        }
    }
    return out;
}

/// Drinfeld module t -> t tau^0 + a_1 tau + ... + a_r tau^r over F_q(t).
class DrinfeldModule {
public:
    DrinfeldModule(FieldPtr field, std::vector<RatFunc> a) : field_(std::move(field)), a_(std::move(a)) {
        if (a_.empty()) throw precondition_error("rank must be at least 1");
        for (const auto& c : a_) require_same_field(field_, c.field());
        if (a_.back().is_zero()) throw precondition_error("leading coefficient a_r must be nonzero");
    }

    /// Carlitz module t -> t + tau.
    static DrinfeldModule carlitz(const FieldPtr& F) { return DrinfeldModule(F, {RatFunc::from_int(F, 1)}); }

    const FieldPtr& field() const noexcept { return field_; }
    std::size_t rank() const noexcept { return a_.size(); }
    /// a_i for 1 <= i <= r.
    const RatFunc& a(std::size_t i) const {
        if (i == 0 || i > a_.size()) throw precondition_error("coefficient index out of range");
        return a_[i - 1];
    }
    const std::vector<RatFunc>& coefficients() const noexcept { return a_; }
    const RatFunc& leading() const noexcept { return a_.back(); }

    /// q^r, the X-degree of phi_t.
    std::uint64_t degree_of_phi_t() const {
        std::uint64_t d = 1;
        for (std::size_t i = 0; i < a_.size(); ++i) d *= field_->q();
        return d;
    }

    TwistedPoly phi_t() const {
        std::vector<RatFunc> c{RatFunc::t(field_)};
        c.insert(c.end(), a_.begin(), a_.end());
        return TwistedPoly(field_, std::move(c));
    }

    /// phi_t(x) = t x + sum a_i x^{q^i}.
    RatFunc phi_t_eval(const RatFunc& x) const {
        RatFunc acc = RatFunc::t(field_) * x;
        for (std::size_t i = 0; i < a_.size(); ++i)
            if (!a_[i].is_zero()) acc += a_[i] * x.frobenius(i + 1);
        return acc;
    }

    /// a_r == 1.
    bool is_normal_form() const noexcept { return a_.back().is_one(); }

    /// Every a_i in F_q[t] and a_r a nonzero constant.
    bool has_good_reduction_everywhere() const noexcept {
        for (const auto& c : a_)
            if (!c.is_polynomial()) return false;
        return a_.back().is_constant();
    }

    friend bool operator==(const DrinfeldModule& a, const DrinfeldModule& b) {
        return *a.field_ == *b.field_ && a.a_ == b.a_;
    }

private:
    FieldPtr field_;
    std::vector<RatFunc> a_;
};

inline void require_normal_good(const DrinfeldModule& M, const char* op) {
    if (!M.is_normal_form() || !M.has_good_reduction_everywhere())
        throw precondition_error(std::string(op) + " requires a normal-form module with good reduction everywhere");
}

inline TwistedPoly phi_of_by_powers(const DrinfeldModule& M, const Poly& Q);

/// Phi_Q by Horner over Q's coefficients in the twisted ring.
inline TwistedPoly phi_of(const DrinfeldModule& M, const Poly& Q) {
    require_same_field(M.field(), Q.field());
    const FieldPtr& F = M.field();
    if (Q.is_zero()) return TwistedPoly(F);
    const TwistedPoly phi_t = M.phi_t();
    TwistedPoly acc = TwistedPoly::scalar(RatFunc(Poly::constant(F, Q.leading())));
    for (std::size_t j = Q.deg(); j-- > 0;) {
        acc = twisted_compose(acc, phi_t);
        if (!Q.coeff(j).is_zero()) acc = acc + TwistedPoly::scalar(RatFunc(Poly::constant(F, Q.coeff(j))));
    }
#ifndef NDEBUG
    if (Q.deg() <= 3) assert(acc == phi_of_by_powers(M, Q));
#endif
    return acc;
}

/// Phi_Q as sum Q_j (phi_t)^j with explicit powers. Slower; kept as a cross-check of phi_of.
inline TwistedPoly phi_of_by_powers(const DrinfeldModule& M, const Poly& Q) {
    const FieldPtr& F = M.field();
    TwistedPoly acc(F);
    TwistedPoly power = TwistedPoly::identity(F);
    const TwistedPoly phi_t = M.phi_t();
    for (std::size_t j = 0; j < Q.size(); ++j) {
        if (!Q.coeff(j).is_zero())
            acc = acc + twisted_compose(TwistedPoly::scalar(RatFunc(Poly::constant(F, Q.coeff(j)))), power);
        if (j + 1 < Q.size()) power = twisted_compose(power, phi_t);
    }
    return acc;
}

/// Phi_Q(x) via the orbit x, phi_t(x), phi_t^2(x), ...: sum Q_j phi_t^j(x).
inline RatFunc phi_eval(const DrinfeldModule& M, const Poly& Q, const RatFunc& x) {
    require_same_field(M.field(), Q.field());
    require_same_field(M.field(), x.field());
    RatFunc acc(M.field());
    RatFunc y = x;
    for (std::size_t j = 0; j < Q.size(); ++j) {
        if (!Q.coeff(j).is_zero()) acc += y.scaled(Q.coeff(j));
        if (j + 1 < Q.size()) y = M.phi_t_eval(y);
    }
    return acc;
}

/// Phi_Q(x) by expanding Phi_Q and evaluating its sparse X-form.
inline RatFunc phi_eval_direct(const DrinfeldModule& M, const Poly& Q, const RatFunc& x) {
    return phi_of(M, Q).apply(x);
}

/// Finite places where some a_i is not integral or a_r is not a unit.
inline PlaceSet good_reduction_check(const DrinfeldModule& M) {
    PlaceSet bad;
    for (const auto& c : M.coefficients()) {
        auto d = finite_places_dividing(c.den());
        bad.insert(d.begin(), d.end());
    }
    auto lead = finite_places_dividing(M.leading().num());
    bad.insert(lead.begin(), lead.end());
    return bad;
}

/// log M_v for the X-form f of phi_t: the escape radius beyond which
/// |phi_t(x)|_v = |a_r x^{q^r}|_v. Floored at 0.
inline Rational escape_bound(const DrinfeldModule& M, const Place& v) {
    const SparsePoly f = x_polynomial(M.phi_t());
    const std::uint64_t d = f.degree();
    const RatFunc& lead = f.leading();
    Rational best = 0;
    Rational first = -log_abs(lead, v) / Rational(static_cast<std::int64_t>(d - 1));
    if (first > best) best = first;
    for (const auto& term : f.terms()) {
        if (term.exponent == d) continue;
        Rational l = log_abs(term.coeff / lead, v) / Rational(static_cast<std::int64_t>(d - term.exponent));
        if (l > best) best = l;
    }
    return best;
}

struct TorsionCertificate {
    enum class Kind { torsion, non_torsion, undecided };

    Kind kind = Kind::undecided;
    std::optional<Poly> annihilator;  // torsion: monic generator of the annihilator ideal
    std::optional<Place> witness;     // non_torsion: place where the orbit escapes
    std::int64_t step = 0;            // escape step, or steps taken when undecided
};

namespace detail {

// Monic generator of Ann(x), given a nonzero annihilating relation.
inline Poly minimal_annihilator(const DrinfeldModule& M, const RatFunc& x, Poly relation) {
    relation = relation.monic();
    for (const auto& fac : factor(relation).factors) {
        for (std::int64_t k = 0; k < fac.exponent; ++k) {
            Poly smaller = exact_div(relation, fac.poly);
            if (!phi_eval(M, smaller, x).is_zero()) break;
            relation = std::move(smaller);
        }
    }
    if (!phi_eval(M, relation, x).is_zero()) throw std::logic_error("annihilator verification failed");
    return relation;
}

}  // namespace detail

/// Decide torsion for x in F_q(t) by orbit cycle detection under phi_t plus
/// escape detection at every place where the orbit can grow.
inline TorsionCertificate torsion_test(const DrinfeldModule& M, const RatFunc& x, std::int64_t n_max) {
    if (n_max <= 0) throw precondition_error("n_max must be positive");
    require_same_field(M.field(), x.field());
    const PlaceSet bad = good_reduction_check(M);
    std::vector<std::pair<Place, Rational>> bounds;
    bounds.emplace_back(Place::infinity(), escape_bound(M, Place::infinity()));
    for (const auto& v : bad) bounds.emplace_back(v, escape_bound(M, v));

    std::map<RatFunc, std::int64_t> seen;
    RatFunc y = x;
    for (std::int64_t k = 0; k <= n_max; ++k) {
        if (auto it = seen.find(y); it != seen.end()) {
            // phi_{t^k}(x) = phi_{t^j}(x): t^j (t^{k-j} - 1) annihilates x.
            const std::int64_t j = it->second;
            const FieldPtr& F = M.field();
            Poly relation = Poly::monomial(F, F->one(), static_cast<std::size_t>(k)) -
                            Poly::monomial(F, F->one(), static_cast<std::size_t>(j));
            TorsionCertificate cert;
            cert.kind = TorsionCertificate::Kind::torsion;
            cert.annihilator = detail::minimal_annihilator(M, x, std::move(relation));
            cert.step = k;
            return cert;
        }
        seen.emplace(y, k);
        if (!y.is_zero()) {
            // At a good finite place log M_v = 0, so any such place dividing the denominator is an escape.
            Poly rest = y.den();
            for (const auto& v : bad) rest = strip_factor(rest, v.pi()).second;
            if (!rest.is_constant()) {
                TorsionCertificate cert;
                cert.kind = TorsionCertificate::Kind::non_torsion;
                cert.witness = Place::finite_unchecked(prime_divisors(rest).front());
                cert.step = k;
                return cert;
            }
            for (const auto& [v, log_m] : bounds) {
                if (log_abs(y, v) > log_m) {
                    TorsionCertificate cert;
                    cert.kind = TorsionCertificate::Kind::non_torsion;
                    cert.witness = v;
                    cert.step = k;
                    return cert;
                }
            }
        }
        if (k < n_max) y = M.phi_t_eval(y);
    }
    TorsionCertificate cert;
    cert.kind = TorsionCertificate::Kind::undecided;
    cert.step = n_max;
    return cert;
}

}  // namespace drinfeld

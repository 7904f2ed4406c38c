#pragma once

#include <algorithm>
#include <cstdint>
#include <random>
#include <vector>

#include "poly.hpp"

namespace drinfeld {

/// Seed for the equal-degree splitting stream. Factorizations are reproducible
/// run to run; override through FactorOptions.
inline constexpr std::uint64_t default_factor_seed = 0x5d1f2e3c4b5a6978ULL;

struct FactorOptions {
    std::uint64_t seed = default_factor_seed;
};

struct Factor {
    Poly poly;  // monic irreducible
    std::int64_t exponent = 1;
};

struct Factorization {
    FqElem unit;  // leading coefficient of the input
    std::vector<Factor> factors;

    Poly expand(const FieldPtr& F) const {
        Poly acc = Poly::constant(F, unit);
        for (const auto& f : factors) acc *= pow(f.poly, static_cast<std::uint64_t>(f.exponent));
        return acc;
    }
};

/// Distinct-degree criterion: f is irreducible iff gcd(t^{q^k} - t, f) = 1 for all k <= deg f / 2.
inline bool is_irreducible(const Poly& f) {
    if (f.is_constant()) throw precondition_error("irreducibility of a constant polynomial is undefined");
    const Poly g = f.monic();
    const std::size_t n = g.deg();
    if (n == 1) return true;
    const FieldPtr& F = g.field();
    const Poly t = Poly::t(F);
    Poly h = t % g;
    for (std::size_t k = 1; k <= n / 2; ++k) {
        h = powmod(h, F->q(), g);
        if (!gcd(g, h - t).is_one()) return false;
    }
    return true;
}

namespace detail {

// p-th root of a polynomial whose derivative vanishes: sum c_{kp} t^{kp} -> sum c_{kp}^{1/p} t^k.
inline Poly pth_root(const Poly& f) {
    const Field& F = *f.field();
    const std::uint32_t p = F.p();
    std::vector<FqElem> v(f.deg() / p + 1);
    for (std::size_t k = 0; k < v.size(); ++k) v[k] = F.pth_root(f.coeff(k * p));
    return Poly(f.field(), std::move(v));
}

inline void squarefree(const Poly& f, std::int64_t mult, std::vector<Factor>& out) {
    if (f.is_constant()) return;
    Poly c = gcd(f, f.derivative());
    Poly w = exact_div(f, c);
    std::int64_t i = 1;
    while (!w.is_one()) {
        Poly y = gcd(w, c);
        Poly fac = exact_div(w, y);
        if (!fac.is_one()) out.push_back({fac, i * mult});
        w = std::move(y);
        c = exact_div(c, w);
        ++i;
    }
    if (!c.is_one()) squarefree(pth_root(c), mult * f.field()->p(), out);
}

inline void distinct_degree(Poly f, std::vector<std::pair<Poly, std::size_t>>& out) {
    const FieldPtr& F = f.field();
    const Poly t = Poly::t(F);
    Poly h = t % f;
    for (std::size_t i = 1; !f.is_one() && f.deg() >= 2 * i; ++i) {
        h = powmod(h, F->q(), f);
        Poly g = gcd(f, h - t);
        if (!g.is_one()) {
            out.emplace_back(g, i);
            f = exact_div(f, g);
            h = h % f;
        }
    }
    if (!f.is_one()) out.emplace_back(f, f.deg());
}

inline Poly random_below(const FieldPtr& F, std::size_t n, std::mt19937_64& rng) {
    std::vector<FqElem> v(n);
    for (auto& x : v) x = F->random(rng);
    return Poly(F, std::move(v));
}

// f is a product of distinct monic irreducibles, all of degree d.
inline void equal_degree(const Poly& f, std::size_t d, std::mt19937_64& rng, std::vector<Poly>& out) {
    if (f.deg() == d) {
        out.push_back(f);
        return;
    }
    const FieldPtr& F = f.field();
    const std::uint64_t q = F->q();
    for (;;) {
        Poly a = random_below(F, f.deg(), rng);
        if (a.is_constant()) continue;
        Poly b(F);
        if (q % 2 == 1) {
            // a^{(q^d - 1)/2} = (a^{1 + q + ... + q^{d-1}})^{(q-1)/2}
            Poly norm = a, power = a;
            for (std::size_t i = 1; i < d; ++i) {
                power = powmod(power, q, f);
                norm = mulmod(norm, power, f);
            }
            b = powmod(norm, (q - 1) / 2, f) - Poly::one(F);
        } else {
            // absolute trace to F_2: a + a^2 + a^4 + ... over e*d terms
            const std::size_t terms = static_cast<std::size_t>(F->e()) * d;
            Poly power = a;
            b = a;
            for (std::size_t i = 1; i < terms; ++i) {
                power = mulmod(power, power, f);
                b += power;
            }
        }
        Poly g = gcd(f, b);
        if (!g.is_one() && g.deg() < f.deg()) {
            equal_degree(g, d, rng, out);
            equal_degree(exact_div(f, g), d, rng, out);
            return;
        }
    }
}

}  // namespace detail

/// Complete factorization into monic irreducibles: squarefree, then
/// distinct-degree, then equal-degree splitting.
inline Factorization factor(const Poly& f, const FactorOptions& options = {}) {
    if (f.is_zero()) throw precondition_error("cannot factor the zero polynomial");
    Factorization result{f.leading(), {}};
    if (f.is_constant()) return result;
    std::mt19937_64 rng(options.seed);
    std::vector<Factor> sqf;
    detail::squarefree(f.monic(), 1, sqf);
    std::vector<Factor> all;
    for (const auto& [part, mult] : sqf) {
        std::vector<std::pair<Poly, std::size_t>> dd;
        detail::distinct_degree(part, dd);
        for (const auto& [block, d] : dd) {
            std::vector<Poly> irreducibles;
            detail::equal_degree(block, d, rng, irreducibles);
            for (auto& g : irreducibles) all.push_back({std::move(g), mult});
        }
    }
    std::sort(all.begin(), all.end(), [](const Factor& a, const Factor& b) { return a.poly < b.poly; });
    // Squarefree parts are pairwise coprime; equal keys would only arise from a split bug.
    for (auto& fac : all) {
        if (!result.factors.empty() && result.factors.back().poly == fac.poly)
            result.factors.back().exponent += fac.exponent;
        else
            result.factors.push_back(std::move(fac));
    }
    return result;
}

}  // namespace drinfeld

#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "heights.hpp"

namespace drinfeld {

struct HaarIntegral {
    Rational exact;       // -1 / (q^r - 1)
    Rational brute;       // expectation over all truncated r-tuples
    Rational tail_bound;  // (N + 1) q^{-rN}
};

namespace detail {

// Number of length-N digit strings whose first nonzero digit sits at position
// k (k = 1..N); slot 0 counts the all-zero string.
inline std::vector<BigInt> tail_histogram(std::uint64_t q, std::int64_t N) {
    std::vector<BigInt> hist(static_cast<std::size_t>(N) + 1, 0);
    const BigInt total = ipow(BigInt(q), static_cast<std::uint64_t>(N));
    if (total <= 1'000'000) {
        const auto count = total.convert_to<std::uint64_t>();
        for (std::uint64_t code = 0; code < count; ++code) {
            // Digit i of code is the coefficient of t^{-i}.
            std::uint64_t c = code;
            std::int64_t first = 0;
            for (std::int64_t k = 1; k <= N; ++k, c /= q)
                if (c % q != 0) {
                    first = k;
                    break;
                }
            ++hist[static_cast<std::size_t>(first)];
        }
    } else {
        hist[0] = 1;
        for (std::int64_t k = 1; k <= N; ++k)
            hist[static_cast<std::size_t>(k)] = BigInt(q - 1) * ipow(BigInt(q), static_cast<std::uint64_t>(N - k));
    }
    return hist;
}

}  // namespace detail

/// Mean of max_i log|x_i|_inf over r-tuples in the unit ball F_q[[1/t]].
/// The brute value averages over every tuple truncated to the coefficients of
/// t^0 .. t^{-(N-1)}; the all-zero tuple scores -N.
inline HaarIntegral haar_log_integral(std::uint64_t q, std::int64_t r, std::int64_t N) {
    if (r < 1) throw precondition_error("rank must be at least 1");
    if (N < 1) throw precondition_error("truncation must be at least 1");
    if (q < 2) throw precondition_error("q must be a prime power");
    const BigInt qr = ipow(BigInt(q), static_cast<std::uint64_t>(r));
    HaarIntegral out;
    out.exact = Rational(-1) / Rational(qr - 1);
    out.tail_bound = Rational(N + 1) / Rational(ipow(qr, static_cast<std::uint64_t>(N)));

    // max_i log|x_i| = 1 - min_i k_i over nonzero components. With
    // G(m) = #{components with k >= m or zero}, #{tuples with min k >= m} = G(m)^r.
    const auto hist = detail::tail_histogram(q, N);
    std::vector<BigInt> at_least(static_cast<std::size_t>(N) + 2, 0);
    at_least[static_cast<std::size_t>(N) + 1] = hist[0];
    for (std::int64_t m = N; m >= 1; --m)
        at_least[static_cast<std::size_t>(m)] = at_least[static_cast<std::size_t>(m) + 1] + hist[static_cast<std::size_t>(m)];
    BigInt sum = 0;
    for (std::int64_t m = 1; m <= N; ++m) {
        const BigInt tuples = ipow(at_least[static_cast<std::size_t>(m)], static_cast<std::uint64_t>(r)) -
                              ipow(at_least[static_cast<std::size_t>(m) + 1], static_cast<std::uint64_t>(r));
        sum -= tuples * (m - 1);
    }
    sum -= BigInt(N);  // the all-zero tuple
    out.brute = Rational(sum) / Rational(ipow(BigInt(q), static_cast<std::uint64_t>(r * N)));
    return out;
}

/// First n Laurent coefficients of P / Q at infinity: entry k - 1 is the
/// coefficient of t^{-k}.
inline std::vector<FqElem> laurent_tail(const Poly& P, const Poly& Q, std::int64_t n) {
    if (Q.is_zero()) throw division_by_zero();
    std::vector<FqElem> out(static_cast<std::size_t>(n), Q.field()->zero());
    if (n == 0 || P.is_zero()) return out;
    const Poly quot = P.shifted(static_cast<std::size_t>(n)) / Q;
    for (std::int64_t k = 1; k <= n; ++k) out[static_cast<std::size_t>(k - 1)] = quot.coeff(static_cast<std::size_t>(n - k));
    return out;
}

struct LatticeCount {
    BigInt formula;                    // q^{sum(deg Q - n_i)}
    std::optional<BigInt> brute;       // exhaustive, when requested and feasible
    std::optional<BigInt> monic_only;  // same count restricted to monic P_i
};

namespace detail {

inline std::vector<Poly> polys_below(const FieldPtr& F, std::size_t d, bool monic_only) {
    std::vector<Poly> out;
    const std::uint64_t q = F->q();
    if (!monic_only) {
        std::uint64_t count = 1;
        for (std::size_t i = 0; i < d; ++i) count *= q;
        for (std::uint64_t code = 0; code < count; ++code) {
            std::vector<FqElem> c(d);
            std::uint64_t x = code;
            for (std::size_t i = 0; i < d; ++i, x /= q) c[i] = FqElem{static_cast<std::uint32_t>(x % q)};
            out.emplace_back(F, std::move(c));
        }
        return out;
    }
    for (std::size_t deg = 0; deg < d; ++deg) {
        std::uint64_t count = 1;
        for (std::size_t i = 0; i < deg; ++i) count *= q;
        for (std::uint64_t code = 0; code < count; ++code) {
            std::vector<FqElem> c(deg + 1);
            std::uint64_t x = code;
            for (std::size_t i = 0; i < deg; ++i, x /= q) c[i] = FqElem{static_cast<std::uint32_t>(x % q)};
            c[deg] = F->one();
            out.emplace_back(F, std::move(c));
        }
    }
    return out;
}

inline BigInt count_matching(const Poly& Q, const std::vector<Poly>& candidates, const std::vector<FqElem>& tail,
                             std::int64_t n) {
    BigInt hits = 0;
    for (const auto& P : candidates) {
        const auto got = laurent_tail(P, Q, n);
        if (std::equal(got.begin(), got.end(), tail.begin())) ++hits;
    }
    return hits;
}

}  // namespace detail

/// Number of tuples (P_1..P_r), deg P_i < deg Q, with P_i / Q matching the
/// first n_i Laurent coefficients of tails[i].
inline LatticeCount lattice_count(const Poly& Q, const std::vector<std::vector<FqElem>>& tails,
                                  const std::vector<std::int64_t>& depths, bool brute = false,
                                  bool monic_only = false) {
    if (Q.is_zero()) throw precondition_error("Q must be nonzero");
    if (tails.size() != depths.size() || tails.empty())
        throw precondition_error("one tail and one depth per component are required");
    const FieldPtr& F = Q.field();
    const auto d = static_cast<std::int64_t>(Q.deg());
    std::int64_t free_dims = 0;
    for (std::size_t i = 0; i < tails.size(); ++i) {
        if (depths[i] < 0) throw precondition_error("depth must be nonnegative");
        if (depths[i] > d) throw precondition_error("depth exceeds deg Q");
        if (static_cast<std::int64_t>(tails[i].size()) < depths[i])
            throw precondition_error("tail shorter than its depth");
        free_dims += d - depths[i];
    }
    LatticeCount out;
    out.formula = ipow(BigInt(F->q()), static_cast<std::uint64_t>(free_dims));
    const auto r = static_cast<std::uint64_t>(tails.size());
    const BigInt space = ipow(BigInt(F->q()), r * static_cast<std::uint64_t>(d));
    auto enumerate = [&](bool monic) {
        // Tuples are independent across components, so the tuple count is
        // the product of the per-component counts.
        const auto candidates = detail::polys_below(F, static_cast<std::size_t>(d), monic);
        BigInt total = 1;
        for (std::size_t i = 0; i < tails.size(); ++i)
            total *= detail::count_matching(Q, candidates, tails[i], depths[i]);
        return total;
    };
    if (brute) {
        if (space > 1'000'000) throw precondition_error("brute enumeration limited to q^{r deg Q} <= 10^6");
        out.brute = enumerate(false);
    }
    if (monic_only) {
        if (space > 1'000'000) throw precondition_error("monic enumeration limited to q^{r deg Q} <= 10^6");
        out.monic_only = enumerate(true);
    }
    return out;
}

struct ShellRow {
    Rational log_radius;
    std::int64_t count = 0;             // points on this shell
    std::int64_t cumulative_count = 0;  // points with log-distance <= log_radius
    Rational packet_fraction;
    std::optional<Rational> ball_mass;  // q^{r (log_radius - outermost)} when the exponent is integral
};

struct ShellReport {
    std::vector<ShellRow> rows;
    std::int64_t packet_size = 0;
    std::int64_t deflated = 0;
};

/// Shells of the packet Phi[Q] around beta at the infinite place. For beta = 0
/// the zero root is removed.
inline ShellReport packet_ball_report(const DrinfeldModule& M, const Poly& Q, const RatFunc& beta) {
    if (Q.is_zero()) throw precondition_error("Q must be nonzero");
    ShellReport report;
    const ValuationProfile profile =
        beta.is_zero() ? root_valuations(x_polynomial(phi_of(M, Q)), Place::infinity())
                       : packet_distance_profile(M, Q, beta, RatFunc(M.field()), Place::infinity());
    report.deflated = beta.is_zero() ? profile.zero_roots : 0;
    report.packet_size = profile.root_count() + profile.zero_roots;
    const std::int64_t denom = report.packet_size - report.deflated;
    const Rational outer = profile.entries.empty() ? Rational(0) : profile.entries.back().log_value;
    const BigInt qr(M.degree_of_phi_t());
    std::int64_t cumulative = 0;
    for (const auto& e : profile.entries) {
        cumulative += e.multiplicity;
        ShellRow row{e.log_value, e.multiplicity, cumulative, make_rational(cumulative, denom), std::nullopt};
        const Rational gap = e.log_value - outer;  // <= 0
        if (denominator(gap) == 1) {
            const auto k = static_cast<std::uint64_t>(-numerator(gap).convert_to<std::int64_t>());
            row.ball_mass = Rational(1) / Rational(ipow(qr, k));
        }
        report.rows.push_back(std::move(row));
    }
    return report;
}

}  // namespace drinfeld

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <future>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "heights.hpp"

namespace drinfeld {

// S-integrality of a moving point gamma with respect to the base point beta:
// at every place v outside S,
//   log|beta|_v <= 0  requires  log|beta - gamma|_v >= 0,
//   log|beta|_v  > 0  requires  log|gamma|_v <= 0.

/// Exact test for gamma in F_q(t) (its only conjugate is itself).
inline bool s_integral_rational(const RatFunc& gamma, const RatFunc& beta, const PlaceSet& S) {
    require_same_field(gamma.field(), beta.field());
    const RatFunc diff = beta - gamma;
    if (diff.is_zero()) return false;  // |0|_v >= 1 fails at every place where |beta|_v <= 1
    PlaceSet check = support(diff);
    if (!gamma.is_zero()) {
        auto sg = support(gamma);
        check.insert(sg.begin(), sg.end());
    }
    if (!beta.is_zero()) {
        auto sb = support(beta);
        check.insert(sb.begin(), sb.end());
    }
    for (const auto& v : check) {
        if (S.contains(v)) continue;
        const bool beta_small = beta.is_zero() || log_abs(beta, v) <= 0;
        if (beta_small) {
            if (log_abs(diff, v) < 0) return false;
        } else if (!gamma.is_zero() && log_abs(gamma, v) > 0) {
            return false;
        }
    }
    return true;
}

struct IntegralityWitness {
    Place place;
    Rational log_value;
    std::int64_t multiplicity = 0;
};

struct RationalPointVerdict {
    RatFunc point;
    bool s_integral = false;
};

/// Profile actually examined at one relevant place.
struct PlaceCheck {
    Place place;
    bool distance_branch = true;  // true: log|beta - gamma| >= 0 required; false: log|gamma| <= 0 required
    ValuationProfile profile;
    std::int64_t violating = 0;
    std::int64_t total = 0;
};

struct IntegralityVerdict {
    enum class Kind { all, none, indeterminate };

    Kind kind = Kind::all;
    std::vector<IntegralityWitness> witnesses;
    std::vector<RationalPointVerdict> rational_points;
    std::vector<PlaceCheck> checks;
};

inline std::string to_string(IntegralityVerdict::Kind k) {
    switch (k) {
        case IntegralityVerdict::Kind::all: return "ALL";
        case IntegralityVerdict::Kind::none: return "NONE";
        case IntegralityVerdict::Kind::indeterminate: return "INDETERMINATE";
    }
    return "?";
}

namespace detail {

// Shared trichotomy: examine each relevant place with the branch selected by |beta|_v.
// The distance profile has roots beta - gamma; the point profile has roots gamma.
inline IntegralityVerdict decide(const RatFunc& beta, const PlaceSet& relevant,
                                 const std::function<ValuationProfile(const Place&)>& distance,
                                 const std::function<ValuationProfile(const Place&)>& point) {
    IntegralityVerdict verdict;
    std::optional<Place> none_place;
    bool any_violation = false;
    for (const auto& v : relevant) {
        const bool beta_small = beta.is_zero() || log_abs(beta, v) <= 0;
        PlaceCheck check{v, beta_small, beta_small ? distance(v) : point(v), 0, 0};
        // Roots at zero: distance zero violates (|0| < 1); gamma = 0 satisfies |gamma| <= 1.
        check.total = check.profile.root_count() + check.profile.zero_roots;
        if (beta_small) check.violating += check.profile.zero_roots;
        for (const auto& e : check.profile.entries) {
            const bool bad = beta_small ? e.log_value < 0 : e.log_value > 0;
            if (!bad) continue;
            check.violating += e.multiplicity;
            verdict.witnesses.push_back({v, e.log_value, e.multiplicity});
        }
        if (check.violating > 0) any_violation = true;
        if (check.total > 0 && check.violating == check.total && !none_place) none_place = v;
        verdict.checks.push_back(std::move(check));
    }
    if (none_place) {
        verdict.kind = IntegralityVerdict::Kind::none;
        std::erase_if(verdict.witnesses, [&](const IntegralityWitness& w) { return !(w.place == *none_place); });
    } else if (any_violation) {
        verdict.kind = IntegralityVerdict::Kind::indeterminate;
    } else {
        verdict.kind = IntegralityVerdict::Kind::all;
    }
    return verdict;
}

}  // namespace detail

/// Packet-level S-integrality of {gamma : Phi_Q(gamma) = alpha} with respect to beta.
///
/// Relevant places are (support(beta) + support(Phi_Q(beta) - alpha) +
/// support(alpha) + inf) minus S; elsewhere the distance polygon is flat. ALL
/// when no root violates at any relevant place; NONE when at one place every
/// root violates; INDETERMINATE otherwise, with witnesses. K-rational packet
/// points get exact per-point verdicts.
inline IntegralityVerdict packet_integrality_verdict(const DrinfeldModule& M, const Poly& Q, const RatFunc& beta,
                                                     const PlaceSet& S, const RatFunc& alpha) {
    require_normal_good(M, "packet integrality");
    const Packet packet = make_packet(M, Q, beta, alpha);
    PlaceSet relevant = support(packet.offset);
    if (!beta.is_zero()) {
        auto sb = support(beta);
        relevant.insert(sb.begin(), sb.end());
    }
    if (!alpha.is_zero()) {
        auto sa = support(alpha);
        relevant.insert(sa.begin(), sa.end());
    }
    relevant.insert(Place::infinity());
    for (const auto& v : S) relevant.erase(v);

    IntegralityVerdict verdict = detail::decide(
        beta, relevant, [&](const Place& v) { return distance_profile(packet, v); },
        [&](const Place& v) { return point_profile(packet, v); });
    for (const auto& gamma : packet.known_points())
        verdict.rational_points.push_back({gamma, s_integral_rational(gamma, beta, S)});
    return verdict;
}

inline IntegralityVerdict packet_integrality_verdict(const DrinfeldModule& M, const Poly& Q, const RatFunc& beta,
                                                     const PlaceSet& S) {
    return packet_integrality_verdict(M, Q, beta, S, RatFunc(M.field()));
}

/// S-integrality of all roots of f (the moving points) with respect to beta.
/// Relevant places are those where either polygon may be non-flat, plus
/// support(beta) and inf, minus S.
inline IntegralityVerdict polynomial_integrality_verdict(const SparsePoly& f, const RatFunc& beta, const PlaceSet& S) {
    const SparsePoly shifted = f.shifted(beta);  // roots gamma - beta
    PlaceSet relevant = nonflat_finite_places(f);
    auto more = nonflat_finite_places(shifted);
    relevant.insert(more.begin(), more.end());
    if (!beta.is_zero()) {
        auto sb = support(beta);
        relevant.insert(sb.begin(), sb.end());
    }
    relevant.insert(Place::infinity());
    for (const auto& v : S) relevant.erase(v);
    return detail::decide(
        beta, relevant, [&](const Place& v) { return root_valuations(shifted, v); },
        [&](const Place& v) {
            ValuationProfile p = root_valuations(f, v);
            return p;
        });
}

// ---------------------------------------------------------------------------
// Scans

struct ScanRow {
    Poly Q;
    bool coincident = false;  // Phi_Q(beta) == alpha; no verdict
    IntegralityVerdict verdict;
};

struct ScanReport {
    std::vector<ScanRow> rows;
    std::int64_t count_all = 0;
    std::int64_t count_none = 0;
    std::int64_t count_indeterminate = 0;
    std::vector<Poly> candidates;  // ALL verdicts among nonconstant Q
};

/// Monic polynomials of degree <= max_deg, ordered by degree then coefficients.
inline std::vector<Poly> monic_polynomials_up_to(const FieldPtr& F, std::int64_t max_deg) {
    std::vector<Poly> out;
    const std::uint64_t q = F->q();
    for (std::int64_t d = 0; d <= max_deg; ++d) {
        std::uint64_t count = 1;
        for (std::int64_t i = 0; i < d; ++i) count *= q;
        for (std::uint64_t k = 0; k < count; ++k) {
            std::vector<FqElem> c(static_cast<std::size_t>(d) + 1);
            std::uint64_t code = k;
            // Lexicographic from the top coefficient down.
            for (std::int64_t i = d - 1; i >= 0; --i) {
                c[static_cast<std::size_t>(i)] = FqElem{static_cast<std::uint32_t>(code % q)};
                code /= q;
            }
            c[static_cast<std::size_t>(d)] = F->one();
            out.emplace_back(F, std::move(c));
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

/// Verdicts for every monic Q with deg Q <= max_deg. The base point must be
/// certified nontorsion (torsion base points are rejected with their
/// annihilator); a nonzero alpha must also be nontorsion.
inline ScanReport integrality_scan(const DrinfeldModule& M, const RatFunc& beta, const PlaceSet& S,
                                   std::int64_t max_deg, const RatFunc& alpha, unsigned threads = 0) {
    require_normal_good(M, "integrality scan");
    if (max_deg < 0) throw precondition_error("max_deg must be nonnegative");
    require_nontorsion(M, beta);
    if (!alpha.is_zero()) {
        TorsionCertificate cert = torsion_test(M, alpha, 64);
        if (cert.kind != TorsionCertificate::Kind::non_torsion)
            throw precondition_error("alpha must be certified nontorsion for backward-orbit scans");
    }
    const std::vector<Poly> Qs = monic_polynomials_up_to(M.field(), max_deg);
    ScanReport report;
    report.rows.resize(Qs.size(), ScanRow{Poly(M.field()), false, {}});
    auto work = [&](std::size_t i) {
        ScanRow row{Qs[i], false, {}};
        try {
            row.verdict = packet_integrality_verdict(M, Qs[i], beta, S, alpha);
        } catch (const base_in_packet&) {
            row.coincident = true;
        }
        report.rows[i] = std::move(row);
    };
    if (threads == 0) threads = std::max(1U, std::thread::hardware_concurrency());
    threads = std::min<unsigned>(threads, static_cast<unsigned>(Qs.size()));
    if (threads <= 1) {
        for (std::size_t i = 0; i < Qs.size(); ++i) work(i);
    } else {
        std::vector<std::future<void>> jobs;
        for (unsigned w = 0; w < threads; ++w)
            jobs.push_back(std::async(std::launch::async, [&, w] {
                for (std::size_t i = w; i < Qs.size(); i += threads) work(i);
            }));
        for (auto& j : jobs) j.get();
    }
    for (const auto& row : report.rows) {
        if (row.coincident) continue;
        switch (row.verdict.kind) {
            case IntegralityVerdict::Kind::all:
                ++report.count_all;
                if (!row.Q.is_constant()) report.candidates.push_back(row.Q);
                break;
            case IntegralityVerdict::Kind::none: ++report.count_none; break;
            case IntegralityVerdict::Kind::indeterminate: ++report.count_indeterminate; break;
        }
    }
    return report;
}

// ---------------------------------------------------------------------------
// Torsion discreteness at a finite place

struct BallBound {
    Rational s0_log;       // log|pi|_v / (q - 1)
    std::int64_t n0 = 1;   // torsion x with log|x|_v < s_log is killed by pi^{n0}
};

/// s0 = |pi|_v^{1/(q-1)} and the least integer n0 >= max(1, 1 + log_q(log_s s0)),
/// i.e. the least n0 >= 1 with q^{n0 - 1} >= s0_log / s_log.
inline BallBound torsion_ball_bound(const DrinfeldModule& M, const Place& v, const Rational& s_log) {
    if (!M.has_good_reduction_everywhere()) throw precondition_error("torsion ball bound needs good reduction everywhere");
    if (v.is_infinite()) throw precondition_error("torsion ball bound needs a finite place");
    if (s_log >= 0) throw precondition_error("s_log must be negative");
    const Rational q(static_cast<std::int64_t>(M.field()->q()));
    BallBound b;
    b.s0_log = Rational(-v.degree()) / (q - 1);
    const Rational ratio = b.s0_log / s_log;
    Rational power = 1;  // q^{n0 - 1}
    b.n0 = 1;
    while (power < ratio) {
        power *= q;
        ++b.n0;
    }
    return b;
}

struct TorsionCensus {
    ValuationProfile profile;  // nonzero points of Phi[pi^n] at Finite(pi)
    std::int64_t count_below = 0;
};

inline TorsionCensus torsion_ball_census(const DrinfeldModule& M, const Poly& pi, std::int64_t n, const Rational& s_log) {
    if (n < 1) throw precondition_error("n must be at least 1");
    if (pi.is_constant() || !is_irreducible(pi)) throw precondition_error("pi must be irreducible");
    const Place v = Place::finite_unchecked(pi.monic());
    SparsePoly f = x_polynomial(phi_of(M, pow(pi.monic(), static_cast<std::uint64_t>(n))));
    TorsionCensus census{root_valuations(f, v), 0};
    for (const auto& e : census.profile.entries)
        if (e.log_value < s_log) census.count_below += e.multiplicity;
    return census;
}

// ---------------------------------------------------------------------------
// Minimal packet distances at the infinite place

struct BosserRow {
    Poly Q;
    std::int64_t degree = 0;
    Rational min_log_distance;
};

struct BosserFit {
    std::vector<BosserRow> rows;
    double c0 = 0;
    double c1 = 0;
    std::size_t fit_rows = 0;              // first half
    std::vector<bool> lower_bounds_hold;   // per validation row
};

/// Per Q: the least log|beta - gamma|_inf over Phi[Q]. A least-squares line
/// C0 + C1 * d log d is fitted on the first half of the rows and checked as a
/// lower bound on the second half. Report only.
inline BosserFit bosser_report(const DrinfeldModule& M, const RatFunc& beta, const std::vector<Poly>& Q_list) {
    require_nontorsion(M, beta);
    BosserFit fit;
    for (const auto& Q : Q_list) {
        ValuationProfile p = packet_distance_profile(M, Q, beta, RatFunc(M.field()), Place::infinity());
        fit.rows.push_back({Q, static_cast<std::int64_t>(Q.deg()), *p.min_log()});
    }
    auto x_of = [](std::int64_t d) { return d <= 1 ? 0.0 : static_cast<double>(d) * std::log(static_cast<double>(d)); };
    fit.fit_rows = fit.rows.size() / 2;
    const std::size_t n = fit.fit_rows;
    if (n >= 1) {
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        for (std::size_t i = 0; i < n; ++i) {
            const double x = x_of(fit.rows[i].degree);
            const double y = fit.rows[i].min_log_distance.convert_to<double>();
            sx += x;
            sy += y;
            sxx += x * x;
            sxy += x * y;
        }
        const double denom = static_cast<double>(n) * sxx - sx * sx;
        if (n >= 2 && std::abs(denom) > 1e-12) {
            fit.c1 = (static_cast<double>(n) * sxy - sx * sy) / denom;
            fit.c0 = (sy - fit.c1 * sx) / static_cast<double>(n);
        } else {
            fit.c1 = 0;
            fit.c0 = sy / static_cast<double>(n);
        }
    }
    for (std::size_t i = n; i < fit.rows.size(); ++i) {
        const double predicted = fit.c0 + fit.c1 * x_of(fit.rows[i].degree);
        fit.lower_bounds_hold.push_back(predicted <= fit.rows[i].min_log_distance.convert_to<double>() + 1e-12);
    }
    return fit;
}

// ---------------------------------------------------------------------------
// Small-height S-integral sequence for the Carlitz module

struct SmallHeightRow {
    std::int64_t n = 0;
    SparsePoly F;             // Phi_{t^n}(z)(z - 1) - 1
    Rational avg_h;           // average Weil height of its roots
    Rational U;               // avg height of the roots of F(z + 1), divided by p^n
    IntegralityVerdict verdict;  // roots S-integral w.r.t. beta = 1, S = {inf}
};

inline std::vector<SmallHeightRow> small_height_sequence(std::uint32_t p, const std::vector<std::int64_t>& n_list) {
    if (p % 2 == 0) throw precondition_error("the small-height sequence is reproduced for odd p only");
    const FieldPtr F = Field::prime(p);
    const DrinfeldModule M = DrinfeldModule::carlitz(F);
    const RatFunc one = RatFunc::from_int(F, 1);
    const PlaceSet S{Place::infinity()};
    std::vector<SmallHeightRow> rows;
    for (auto n : n_list) {
        if (n < 1) throw precondition_error("n must be at least 1");
        const SparsePoly phi = x_polynomial(phi_of(M, Poly::monomial(F, F->one(), static_cast<std::size_t>(n))));
        SparsePoly Fn(F);
        for (const auto& term : phi.terms()) {
            Fn.add_term(term.exponent + 1, term.coeff);
            Fn.add_term(term.exponent, -term.coeff);
        }
        Fn.add_term(0, -one);
        const SparsePoly shifted = Fn.shifted(one);
        SmallHeightRow row{n, Fn, packet_naive_height_avg(Fn), 0, polynomial_integrality_verdict(Fn, one, S)};
        row.U = packet_naive_height_avg(shifted) / Rational(ipow(BigInt(p), static_cast<std::uint64_t>(n)));
        rows.push_back(std::move(row));
    }
    return rows;
}

}  // namespace drinfeld

#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <vector>

#include "completion.hpp"
#include "newton.hpp"

namespace drinfeld {

/// Default iteration cap for local heights and torsion checks.
inline constexpr std::int64_t default_n_max = 32;

/// Weil height of x in F_q(t): sum over places of log+ |x|_v = max(deg num, deg den).
inline Rational naive_height(const RatFunc& x) {
    if (x.is_zero()) return 0;
    return Rational(static_cast<std::int64_t>(std::max(x.num().deg(), x.den().deg())));
}

/// Exact value, or a certified enclosure [lower, upper] when the orbit did not
/// leave the escape disk within the iteration cap.
struct LocalHeightResult {
    enum class Kind { exact, bounded };

    Kind kind = Kind::exact;
    Rational value;  // exact
    Rational lower;  // bounded
    Rational upper;  // bounded
    std::optional<std::int64_t> escape_step;

    static LocalHeightResult exact(Rational v, std::optional<std::int64_t> step = std::nullopt) {
        LocalHeightResult r;
        r.kind = Kind::exact;
        r.value = v;
        r.lower = v;
        r.upper = v;
        r.escape_step = step;
        return r;
    }

    static LocalHeightResult bounded(Rational lo, Rational hi) {
        LocalHeightResult r;
        r.kind = Kind::bounded;
        r.lower = lo;
        r.upper = hi;
        return r;
    }

    bool is_exact() const noexcept { return kind == Kind::exact; }
};

struct HeightBreakdown {
    std::map<Place, LocalHeightResult> per_place;
    bool exact = true;
    Rational total;  // exact
    Rational lower;  // interval when not exact
    Rational upper;
};

namespace detail {

// Orbit points larger than this (coefficient count) are tracked in the completion.
inline constexpr std::size_t exact_orbit_budget = 512;

inline Rational q_power(const DrinfeldModule& M, std::int64_t n) {
    return Rational(ipow(BigInt(M.degree_of_phi_t()), static_cast<std::uint64_t>(n)));
}

}  // namespace detail

/// Local canonical height lim log+|phi_{t^n}(x)|_v / q^{rn}.
///
/// At a good finite place this is max(0, log|x|_v). Elsewhere the orbit is
/// iterated until it leaves the escape disk (log|y_k|_v > log M_v, strict);
/// the telescoped closed form then gives the value exactly:
///   q^{-rk} (log|y_k|_v + log|a_r|_v / (q^r - 1)).
/// If the orbit stays inside for n_max steps the result is Exact(0) when x is
/// certified torsion, and otherwise the interval [0, H / q^{r n_max}] with
/// H = max(0, log M_v + log|a_r|_v / (q^r - 1)), a bound on the local height
/// over the escape disk.
inline LocalHeightResult local_canonical_height(const DrinfeldModule& M, const RatFunc& x, const Place& v,
                                                std::int64_t n_max = default_n_max) {
    if (n_max < 0) throw precondition_error("n_max must be nonnegative");
    require_same_field(M.field(), x.field());
    if (!v.is_infinite() && !good_reduction_check(M).contains(v)) return LocalHeightResult::exact(log_plus(x, v));

    const Rational log_m = escape_bound(M, v);
    const Rational d = Rational(static_cast<std::int64_t>(M.degree_of_phi_t()));
    const Rational lead_shift = log_abs(M.leading(), v) / (d - 1);
    Rational sup = log_m + lead_shift;
    if (sup < 0) sup = 0;
    RatFunc y = x;
    for (std::int64_t k = 0; k <= n_max; ++k) {
        if (!y.is_zero()) {
            Rational l = log_abs(y, v);
            if (l > log_m) return LocalHeightResult::exact((l + lead_shift) / detail::q_power(M, k), k);
        }
        if (k == n_max) break;
        if (y.num().size() + y.den().size() > detail::exact_orbit_budget) {
            // The orbit is large but still inside the disk at v: continue in the completion.
            const Completion Kv(v, M.field());
            const std::int64_t prec = 64 + 4 * n_max;
            std::vector<Completion::Elem> coeffs{Kv.from(RatFunc::t(M.field()), prec)};
            for (const auto& a : M.coefficients()) coeffs.push_back(Kv.from(a, prec));
            Completion::Elem z = Kv.from(y, prec);
            for (std::int64_t j = k + 1; j <= n_max; ++j) {
                Completion::Elem next = Kv.mul(coeffs[0], z);
                std::uint64_t qi = 1;
                for (std::size_t i = 1; i < coeffs.size(); ++i) {
                    qi *= M.field()->q();
                    if (coeffs[i].known) next = Kv.add(next, Kv.mul(coeffs[i], Kv.frobenius(z, qi)));
                }
                z = std::move(next);
                if (!z.known) return LocalHeightResult::bounded(0, sup / detail::q_power(M, j - 1));
                const Rational l = Kv.log_abs(z);
                if (l > log_m) return LocalHeightResult::exact((l + lead_shift) / detail::q_power(M, j), j);
            }
            return LocalHeightResult::bounded(0, sup / detail::q_power(M, n_max));
        }
        y = M.phi_t_eval(y);
    }
    TorsionCertificate cert = torsion_test(M, x, std::max<std::int64_t>(n_max, 1));
    if (cert.kind == TorsionCertificate::Kind::torsion) return LocalHeightResult::exact(0);
    return LocalHeightResult::bounded(0, sup / detail::q_power(M, n_max));
}

/// Global canonical height as the sum of local heights over support(x), the
/// infinite place and the bad places; every other place contributes 0.
inline HeightBreakdown global_canonical_height(const DrinfeldModule& M, const RatFunc& x,
                                               std::int64_t n_max = default_n_max) {
    PlaceSet places = good_reduction_check(M);
    places.insert(Place::infinity());
    if (!x.is_zero()) {
        auto s = support(x);
        places.insert(s.begin(), s.end());
    }
    HeightBreakdown out;
    for (const auto& v : places) {
        LocalHeightResult r = local_canonical_height(M, x, v, n_max);
        out.exact = out.exact && r.is_exact();
        out.lower += r.lower;
        out.upper += r.upper;
        out.per_place.emplace(v, std::move(r));
    }
    if (out.exact) out.total = out.lower;
    return out;
}

/// Ingram's local height lambda_v(x) = h_v(x) - log|x|_v + c_v, c_v = -log|a_r|_v / (q^r - 1).
inline LocalHeightResult ingram_lambda(const DrinfeldModule& M, const RatFunc& x, const Place& v,
                                       std::int64_t n_max = default_n_max) {
    if (x.is_zero()) throw infinite_valuation();
    LocalHeightResult h = local_canonical_height(M, x, v, n_max);
    const Rational d = Rational(static_cast<std::int64_t>(M.degree_of_phi_t()));
    const Rational shift = -log_abs(x, v) - log_abs(M.leading(), v) / (d - 1);
    if (h.is_exact()) return LocalHeightResult::exact(h.value + shift, h.escape_step);
    return LocalHeightResult::bounded(h.lower + shift, h.upper + shift);
}

/// c_v = -log|a_r|_v / (q^r - 1); zero for normal-form modules.
inline Rational ingram_constant(const DrinfeldModule& M, const Place& v) {
    const Rational d = Rational(static_cast<std::int64_t>(M.degree_of_phi_t()));
    return -log_abs(M.leading(), v) / (d - 1);
}

struct DenisRow {
    std::int64_t n;
    Rational value;  // h(phi_{t^n}(x)) / q^{rn}
};

/// Rows (n, h(phi_{t^n}(x)) / q^{rn}) for the requested n.
inline std::vector<DenisRow> denis_limit_table(const DrinfeldModule& M, const RatFunc& x,
                                               const std::vector<std::int64_t>& n_list) {
    if (n_list.empty()) throw precondition_error("n_list must be nonempty");
    std::int64_t top = 0;
    for (auto n : n_list) {
        if (n < 0) throw precondition_error("n must be nonnegative");
        top = std::max(top, n);
    }
    std::vector<Rational> heights;
    RatFunc y = x;
    for (std::int64_t n = 0; n <= top; ++n) {
        heights.push_back(naive_height(y) / detail::q_power(M, n));
        if (n < top) y = M.phi_t_eval(y);
    }
    std::vector<DenisRow> rows;
    for (auto n : n_list) rows.push_back({n, heights[static_cast<std::size_t>(n)]});
    return rows;
}

/// Packet average (1 / q^{r deg Q}) * sum over Phi[Q] of log|beta - gamma|_v,
/// which equals log|Phi_Q(beta)|_v / q^{r deg Q} for a normal-form module.
inline Rational packet_avg_log_distance(const DrinfeldModule& M, const Poly& Q, const RatFunc& beta, const Place& v) {
    if (Q.is_zero()) throw precondition_error("Q must be nonzero");
    RatFunc value = phi_eval(M, Q, beta);
    if (value.is_zero()) throw base_in_packet("Phi_Q(beta) = 0: torsion base point for Q = " + to_string(Q));
    return (log_abs(value, v) - log_abs(phi_of(M, Q).leading(), v)) /
           detail::q_power(M, static_cast<std::int64_t>(Q.deg()));
}

/// Certify that beta is not torsion; throws torsion_base with the annihilator.
inline void require_nontorsion(const DrinfeldModule& M, const RatFunc& beta, std::int64_t n_max = 64) {
    TorsionCertificate cert = torsion_test(M, beta, n_max);
    if (cert.kind == TorsionCertificate::Kind::torsion) throw torsion_base(to_string(*cert.annihilator));
    if (cert.kind == TorsionCertificate::Kind::undecided)
        throw precondition_error("could not certify that " + to_string(beta) + " is nontorsion within " +
                                 std::to_string(n_max) + " steps");
}

struct ConvergenceRow {
    Poly Q;
    std::vector<Rational> cells;  // one per column
    Rational others;              // all remaining places, aggregated
    Rational row_sum;             // cells + others; zero by the product formula
};

struct ConvergenceTable {
    std::vector<Place> columns;
    std::vector<ConvergenceRow> rows;
    std::vector<LocalHeightResult> limits;  // local canonical height of beta per column
    HeightBreakdown global;
};

/// Rows Q, columns places: cell = log|Phi_Q(beta)|_v / q^{r deg Q}. Columns
/// are inf, support(beta), support(Phi_Q0(beta)) for the first Q of least
/// degree, plus any extra places; the remaining places are aggregated exactly
/// (sum over the finite places dividing a polynomial f of log|f|_v is -deg f).
inline ConvergenceTable thm12_convergence_table(const DrinfeldModule& M, const RatFunc& beta,
                                                const std::vector<Poly>& Q_list, const PlaceSet& extra = {},
                                                std::int64_t n_max = default_n_max) {
    require_normal_good(M, "convergence table");
    if (Q_list.empty()) throw precondition_error("Q list must be nonempty");
    require_nontorsion(M, beta);
    std::vector<RatFunc> values;
    for (const auto& Q : Q_list) {
        if (Q.is_zero()) throw precondition_error("Q must be nonzero");
        values.push_back(phi_eval(M, Q, beta));
        if (values.back().is_zero()) throw base_in_packet("Phi_Q(beta) = 0 for Q = " + to_string(Q));
    }
    PlaceSet cols = support(beta);
    cols.insert(Place::infinity());
    std::size_t first = 0;
    for (std::size_t i = 1; i < Q_list.size(); ++i)
        if (Q_list[i].deg() < Q_list[first].deg()) first = i;
    auto s0 = support(values[first]);
    cols.insert(s0.begin(), s0.end());
    cols.insert(extra.begin(), extra.end());

    ConvergenceTable table;
    table.columns.assign(cols.begin(), cols.end());
    for (std::size_t i = 0; i < Q_list.size(); ++i) {
        const Rational scale = detail::q_power(M, static_cast<std::int64_t>(Q_list[i].deg()));
        ConvergenceRow row{Q_list[i], {}, 0, 0};
        Poly num = values[i].num(), den = values[i].den();
        for (const auto& v : table.columns) {
            row.cells.push_back(log_abs(values[i], v) / scale);
            if (!v.is_infinite()) {
                num = strip_factor(num, v.pi()).second;
                den = strip_factor(den, v.pi()).second;
            }
        }
        row.others = Rational(static_cast<std::int64_t>(den.deg()) - static_cast<std::int64_t>(num.deg())) / scale;
        row.row_sum = row.others;
        for (const auto& c : row.cells) row.row_sum += c;
        table.rows.push_back(std::move(row));
    }
    for (const auto& v : table.columns) table.limits.push_back(local_canonical_height(M, beta, v, n_max));
    table.global = global_canonical_height(M, beta, n_max);
    return table;
}

/// Average Weil height of the roots of f: (1 / deg f) * sum over places of
/// the positive part of the root-valuation profile.
inline Rational packet_naive_height_avg(const SparsePoly& f) {
    if (f.is_zero() || f.degree() == 0) throw precondition_error("packet height needs a nonconstant polynomial");
    const RatFunc& lead = f.leading();
    Poly dens = Poly::one(f.field());
    for (const auto& term : f.terms()) {
        RatFunc ratio = term.coeff / lead;
        dens = dens * exact_div(ratio.den(), gcd(dens, ratio.den()));
    }
    PlaceSet places = finite_places_dividing(dens);
    places.insert(Place::infinity());
    Rational mass = 0;
    for (const auto& v : places)
        for (const auto& e : root_valuations(f, v).entries)
            if (e.log_value > 0) mass += e.log_value * e.multiplicity;
    return mass / Rational(static_cast<std::int64_t>(f.degree()));
}

}  // namespace drinfeld

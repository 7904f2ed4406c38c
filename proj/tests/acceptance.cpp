#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <sstream>

#include "test_util.hpp"

using namespace drinfeld;
using drinfeld::testing::R;
using drinfeld::testing::random_monic;
using drinfeld::testing::random_poly;
using drinfeld::testing::random_ratfunc;
using drinfeld::testing::T;

namespace {

// Collects failure notes for one criterion.
struct Check {
    std::ostringstream notes;
    bool ok = true;
    void expect(bool cond, const std::string& what) {
        if (!cond) {
            if (ok) notes << what;
            ok = false;
        }
    }
};

Rational orbit_degree_ratio(const DrinfeldModule& M, const RatFunc& x, std::int64_t n) {
    RatFunc y = x;
    const SparsePoly phi = x_polynomial(M.phi_t());
    Rational scale = 1;
    for (std::int64_t k = 0; k < n; ++k) {
        y = phi.eval(y);
        scale *= Rational(static_cast<std::int64_t>(M.degree_of_phi_t()));
    }
    if (y.is_zero()) return 0;
    return Rational(static_cast<std::int64_t>(std::max(y.num().deg(), y.den().deg()))) / scale;
}

Poly t_pow(const FieldPtr& F, std::uint64_t n) { return pow(Poly::t(F), n); }

const PlaceSet& s_inf() {
    static const PlaceSet S{Place::infinity()};
    return S;
}

void criterion1(Check& c) {
    auto F = Field::prime(3);
    auto C = DrinfeldModule::carlitz(F);
    auto h1 = global_canonical_height(C, R(F, "1"));
    c.expect(h1.exact && h1.total == Rational(1, 3), "h(1) != 1/3");
    c.expect(h1.per_place.size() == 1 && h1.per_place.at(Place::infinity()).value == Rational(1, 3),
             "h(1) breakdown");
    auto h2 = global_canonical_height(C, R(F, "1/t"));
    c.expect(h2.exact && h2.total == Rational(10, 9), "h(1/t) != 10/9");
    c.expect(h2.per_place.size() == 2 && h2.per_place.at(Place::infinity()).value == Rational(1, 9) &&
                 h2.per_place.at(Place::finite(Poly::t(F))).value == 1,
             "h(1/t) breakdown");
    const RatFunc x = R(F, "1/t");
    auto rows = denis_limit_table(C, x, {0, 1, 2, 3, 4, 5, 6});
    const std::vector<Rational> expected{1, 1, Rational(10, 9), Rational(10, 9), Rational(10, 9), Rational(10, 9),
                                         Rational(10, 9)};
    for (std::size_t i = 0; i < rows.size(); ++i) {
        c.expect(rows[i].value == expected[i], "Denis row " + std::to_string(i));
        c.expect(rows[i].value == orbit_degree_ratio(C, x, rows[i].n), "Denis oracle row " + std::to_string(i));
    }
}

void criterion2(Check& c) {
    auto F = Field::prime(3);
    auto C = DrinfeldModule::carlitz(F);
    std::vector<Poly> Qs;
    for (std::uint64_t n = 1; n <= 6; ++n) Qs.push_back(t_pow(F, n));
    auto tab = thm12_convergence_table(C, R(F, "1/t"), Qs);
    c.expect(tab.columns.size() == 3 && to_string(tab.columns[0]) == "inf" && to_string(tab.columns[1]) == "t" &&
                 to_string(tab.columns[2]) == "t+1",
             "unexpected columns");
    for (std::size_t i = 0; i < tab.rows.size(); ++i) {
        const auto& row = tab.rows[i];
        const Rational bound = Rational(1) / Rational(ipow(BigInt(3), i));  // 3^{1-n}
        c.expect(row.row_sum == 0, "row sum nonzero");
        c.expect(row.cells[1] == 1, "(t) column != 1");
        c.expect(abs(row.cells[0] - Rational(1, 9)) <= bound, "inf column outside bound");
        c.expect(abs(row.cells[2]) <= bound, "(t+1) column outside bound");
    }
}

void criterion3(Check& c) {
    std::vector<DrinfeldModule> modules{DrinfeldModule::carlitz(Field::prime(2)), DrinfeldModule::carlitz(Field::prime(3))};
    std::mt19937_64 rng(3);
    int done = 0;
    while (done < 200) {
        const auto& M = modules[static_cast<std::size_t>(done) % 2];
        const FieldPtr& F = M.field();
        const Poly Q = random_poly(F, 4, rng);
        const RatFunc beta = random_ratfunc(F, 3, rng);
        const RatFunc value = phi_eval(M, Q, beta);
        if (value.is_zero()) continue;
        const Packet packet = make_packet(M, Q, beta, RatFunc(F));
        PlaceSet places = support(value);
        for (const auto& v : support(beta)) places.insert(v);
        places.insert(Place::infinity());
        for (const auto& v : places)
            c.expect(distance_profile(packet, v).log_sum() == log_abs(value, v),
                     "Q=" + to_string(Q) + " beta=" + to_string(beta) + " at " + to_string(v));
        ++done;
    }
}

std::vector<DrinfeldModule> homomorphism_modules() {
    auto F2 = Field::prime(2);
    auto F3 = Field::prime(3);
    return {DrinfeldModule::carlitz(F2), DrinfeldModule::carlitz(F3), DrinfeldModule(F3, {R(F3, "t"), R(F3, "1")}),
            DrinfeldModule(F2, {R(F2, "1/t")})};
}

void criterion4(Check& c) {
    const auto modules = homomorphism_modules();
    std::mt19937_64 rng(4);
    for (int i = 0; i < 100; ++i) {
        const auto& M = modules[static_cast<std::size_t>(i) % modules.size()];
        const FieldPtr& F = M.field();
        const Poly A = random_poly(F, 3, rng, false), B = random_poly(F, 3, rng, false);
        c.expect(phi_of(M, A + B) == phi_of(M, A) + phi_of(M, B), "additivity");
        c.expect(phi_of(M, A * B) == twisted_compose(phi_of(M, A), phi_of(M, B)), "multiplicativity");
        c.expect(phi_of(M, A).coeff(0) == RatFunc(A), "constant coefficient");
    }
    int pairs = 0;
    while (pairs < 50) {
        const auto& M = modules[static_cast<std::size_t>(pairs) % modules.size()];
        const FieldPtr& F = M.field();
        const Poly Q1 = random_poly(F, 3, rng), Q2 = random_poly(F, 3, rng);
        if (!gcd(Q1, Q2).is_one()) continue;
        const auto x = xgcd(Q1, Q2);
        c.expect(phi_of(M, x.r1 * Q1) + phi_of(M, x.r2 * Q2) == TwistedPoly::identity(F), "Bezout");
        ++pairs;
    }
}

void criterion5(Check& c) {
    auto F2 = Field::prime(2);
    auto C2 = DrinfeldModule::carlitz(F2);
    auto a = torsion_test(C2, R(F2, "t"), 64);
    c.expect(a.kind == TorsionCertificate::Kind::torsion && *a.annihilator == T(F2, "t"), "x=t over F_2");
    auto b = torsion_test(C2, R(F2, "1"), 64);
    c.expect(b.kind == TorsionCertificate::Kind::torsion && *b.annihilator == T(F2, "t^2+t"), "x=1 over F_2");
    auto F3 = Field::prime(3);
    auto d = torsion_test(DrinfeldModule::carlitz(F3), R(F3, "1"), 64);
    c.expect(d.kind == TorsionCertificate::Kind::non_torsion && d.witness->is_infinite() && d.step == 1,
             "x=1 over F_3");
}

void criterion6(Check& c) {
    auto F = Field::prime(3);
    auto C = DrinfeldModule::carlitz(F);
    for (const char* pi_text : {"t", "t+1"}) {
        const Poly pi = T(F, pi_text);
        const Place v = Place::finite(pi);
        for (const Poly& Q : monic_polynomials_up_to(F, 3)) {
            if (Q.is_constant() || !gcd(Q, pi).is_one()) continue;
            for (const auto& e : root_valuations(x_polynomial(phi_of(C, Q)), v).entries)
                c.expect(e.log_value >= 0, std::string("negative log in Phi[") + to_string(Q) + "] at " + pi_text);
        }
        const auto bound = torsion_ball_bound(C, v, -1);
        c.expect(bound.n0 == 1, std::string("n0 != 1 at ") + pi_text);
        for (std::int64_t n = 1; n <= 5; ++n)
            c.expect(torsion_ball_census(C, pi, n, -1).count_below == 0,
                     std::string("census nonzero at ") + pi_text + " n=" + std::to_string(n));
    }
    const auto p = torsion_ball_census(C, Poly::t(F), 2, -1).profile;
    c.expect(p.entries.size() == 2 && p.entries[0] == ProfileEntry{Rational(-1, 2), 2} &&
                 p.entries[1] == ProfileEntry{Rational(-1, 6), 6},
             "Phi[t^2] profile at (t)");
}

void criterion7(Check& c) {
    for (std::uint64_t q : {2U, 3U, 4U, 5U}) {
        for (std::int64_t r = 1; r <= 3; ++r) {
            const Rational exact = Rational(-1) / Rational(ipow(BigInt(q), static_cast<std::uint64_t>(r)) - 1);
            for (std::int64_t N = 1; N * r <= 12; ++N) {
                const auto h = haar_log_integral(q, r, N);
                const std::string tag = "q=" + std::to_string(q) + " r=" + std::to_string(r) + " N=" + std::to_string(N);
                c.expect(h.exact == exact, "exact " + tag);
                c.expect(abs(h.brute - h.exact) <= h.tail_bound, "brute " + tag);
            }
        }
    }
}

void criterion8(Check& c) {
    std::mt19937_64 rng(8);
    std::int64_t mismatches = 0;
    for (std::uint32_t p : {2U, 3U}) {
        auto F = Field::prime(p);
        for (std::size_t d = 1; d <= 4; ++d) {
            for (int trial = 0; trial < 2; ++trial) {
                const Poly Q = trial == 0 ? t_pow(F, d) : random_monic(F, d, rng);
                for (std::int64_t n = 0; n <= static_cast<std::int64_t>(d); ++n)
                    for (int s = 0; s < 10; ++s) {
                        std::vector<FqElem> tail(static_cast<std::size_t>(n));
                        for (auto& x : tail) x = F->random(rng);
                        const auto count = lattice_count(Q, {tail}, {n}, true);
                        if (*count.brute != count.formula) ++mismatches;
                    }
            }
        }
    }
    c.expect(mismatches == 0, std::to_string(mismatches) + " mismatches");
}

// Multiset of log|gamma|_inf over nonzero points of Phi[t^n].
std::map<Rational, std::int64_t> torsion_shells(const DrinfeldModule& C, std::uint64_t n) {
    std::map<Rational, std::int64_t> out;
    if (n == 0) return out;
    for (const auto& row : packet_ball_report(C, t_pow(C.field(), n), RatFunc(C.field())).rows)
        out[row.log_radius] += row.count;
    return out;
}

void criterion9(Check& c) {
    auto F = Field::prime(3);
    auto C = DrinfeldModule::carlitz(F);
    for (std::uint64_t n = 1; n <= 5; ++n) {
        // Exact-order points: Phi[t^n] minus Phi[t^{n-1}].
        auto shells = torsion_shells(C, n);
        for (const auto& [log, mult] : torsion_shells(C, n - 1)) shells[log] -= mult;
        std::erase_if(shells, [](const auto& kv) { return kv.second == 0; });
        std::int64_t expected_mult = 2;
        for (std::uint64_t i = 1; i < n; ++i) expected_mult *= 3;
        const Rational expected_log(3 - 2 * static_cast<std::int64_t>(n), 2);
        std::ostringstream got;
        for (const auto& [log, mult] : shells) got << ' ' << to_string(log) << 'x' << mult;
        c.expect(shells.size() == 1 && shells.begin()->first == expected_log && shells.begin()->second == expected_mult,
                 "n=" + std::to_string(n) + ": exact-order points at" + got.str() + ", expected " +
                     to_string(expected_log) + "x" + std::to_string(expected_mult));
        const auto rows = packet_ball_report(C, t_pow(F, n), RatFunc(F)).rows;
        for (std::size_t k = 1; k < rows.size(); ++k)
            c.expect(rows[k].count == 3 * rows[k - 1].count, "shell ratio n=" + std::to_string(n));
    }
}

void criterion10(Check& c) {
    auto F = Field::prime(3);
    auto C = DrinfeldModule::carlitz(F);
    const auto rep = integrality_scan(C, R(F, "1/t"), s_inf(), 3, RatFunc(F));
    c.expect(rep.rows.size() == 40, "row count");
    bool saw_t = false;
    for (const auto& row : rep.rows) {
        if (!row.Q.is_constant())
            c.expect(row.coincident || row.verdict.kind != IntegralityVerdict::Kind::all, "ALL for " + to_string(row.Q));
        if (row.Q == Poly::t(F)) {
            saw_t = true;
            c.expect(row.verdict.kind == IntegralityVerdict::Kind::indeterminate, "Q=t not INDETERMINATE");
            bool witness = false;
            for (const auto& w : row.verdict.witnesses)
                witness = witness || (to_string(w.place) == "t+1" && w.log_value == -3);
            c.expect(witness, "Q=t lacks witness (t+1) at log -3");
        }
    }
    c.expect(saw_t, "Q=t missing");
    const auto none = packet_integrality_verdict(C, Poly::t(F), R(F, "t^2"), s_inf());
    c.expect(none.kind == IntegralityVerdict::Kind::none && !none.witnesses.empty() &&
                 to_string(none.witnesses.front().place) == "t",
             "beta=t^2 not NONE at (t)");
    auto F2 = Field::prime(2);
    try {
        integrality_scan(DrinfeldModule::carlitz(F2), R(F2, "1"), s_inf(), 1, RatFunc(F2));
        c.expect(false, "torsion base accepted");
    } catch (const torsion_base& e) {
        c.expect(e.annihilator() == "t^2+t", "wrong annihilator " + e.annihilator());
    }
}

void criterion11(Check& c) {
    const auto rows = small_height_sequence(3, {1, 2, 3, 4, 5});
    const auto F = rows[0].F.field();
    SparsePoly F1(F);
    F1.add_term(4, R(F, "1"));
    F1.add_term(3, R(F, "2"));
    F1.add_term(2, R(F, "t"));
    F1.add_term(1, R(F, "2*t"));
    F1.add_term(0, R(F, "2"));
    c.expect(rows[0].F == F1, "F_1");
    c.expect(rows[0].avg_h == Rational(1, 4), "avg_h(F_1)");
    c.expect(rows[0].U == Rational(1, 12), "U_1");
    for (std::size_t i = 1; i < rows.size(); ++i) c.expect(rows[i].U < rows[i - 1].U, "U not decreasing");
    c.expect(rows[4].U < rows[0].U / 10, "U_5 >= U_1/10");
    for (std::size_t i = 0; i < 4; ++i)
        c.expect(rows[i].verdict.kind == IntegralityVerdict::Kind::all, "verdict n=" + std::to_string(rows[i].n));
}

void criterion12(Check& c) {
    auto F = Field::prime(3);
    auto C = DrinfeldModule::carlitz(F);
    std::vector<Poly> Qs;
    for (std::uint64_t n = 1; n <= 8; ++n) Qs.push_back(t_pow(F, n));
    const auto fit = bosser_report(C, R(F, "1"), Qs);
    c.expect(fit.rows.size() == 8, "row count");
    c.expect(!fit.rows.empty() && fit.rows[0].min_log_distance == 0, "row n=1 != 0");
    c.expect(fit.fit_rows == 4 && fit.lower_bounds_hold.size() == 4, "fit layout");
    for (bool ok : fit.lower_bounds_hold) c.expect(ok, "fit does not lower-bound rows 5-8");
}

void criterion13(Check& c) {
    std::vector<FieldPtr> fields{Field::prime(2), Field::prime(3), Field::prime(5), Field::make({3, 2, {1, 0, 1}})};
    std::mt19937_64 rng(13);
    for (int i = 0; i < 200; ++i) {
        const auto& F = fields[static_cast<std::size_t>(i) % fields.size()];
        const RatFunc x = random_ratfunc(F, 10, rng);
        Rational sum = 0;
        for (const auto& v : support(x)) sum += log_abs(x, v);
        c.expect(sum == 0, "product formula " + to_string(x));
        const auto degree = std::max(x.num().deg(), x.den().deg());
        c.expect(naive_height(x) == Rational(static_cast<std::int64_t>(degree)), "naive height " + to_string(x));
    }
    for (int i = 0; i < 200; ++i) {
        const auto& F = fields[static_cast<std::size_t>(i) % fields.size()];
        Poly f = random_poly(F, 20, rng);
        if (i % 4 == 0) f = f * f * random_poly(F, 4, rng);
        c.expect(factor(f).expand(F) == f, "factorization " + to_string(f));
    }
}

}  // namespace

int main() {
    const std::vector<std::pair<std::string, std::function<void(Check&)>>> criteria{
        {"global canonical heights and Denis table", criterion1},
        {"convergence table for Q = t^n", criterion2},
        {"packet product identity", criterion3},
        {"ring homomorphism and Bezout", criterion4},
        {"torsion certificates", criterion5},
        {"coprime torsion and torsion ball census", criterion6},
        {"Haar log-integral", criterion7},
        {"lattice counting", criterion8},
        {"shell statistics", criterion9},
        {"integrality scan", criterion10},
        {"small-height sequence", criterion11},
        {"Bosser report", criterion12},
        {"foundations", criterion13},
    };
    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        Check c;
        try {
            criteria[i].second(c);
        } catch (const std::exception& e) {
            c.expect(false, std::string("exception: ") + e.what());
        }
        std::cout << (c.ok ? "PASS" : "FAIL") << " criterion " << i + 1 << ": " << criteria[i].first;
        if (!c.ok) std::cout << " (" << c.notes.str() << ")";
        std::cout << '\n';
        failed += c.ok ? 0 : 1;
    }
    std::cout << (criteria.size() - static_cast<std::size_t>(failed)) << "/" << criteria.size() << " criteria passed\n";
    return failed == 0 ? 0 : 1;
}

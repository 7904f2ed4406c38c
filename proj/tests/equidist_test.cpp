#include <gtest/gtest.h>

#include <random>

#include "test_util.hpp"

using namespace drinfeld;
using drinfeld::testing::random_monic;
using drinfeld::testing::T;

namespace {

// Literal enumeration of every r-tuple of truncated tails.
Rational haar_by_tuples(std::uint64_t q, std::int64_t r, std::int64_t N) {
    std::uint64_t per = 1;
    for (std::int64_t i = 0; i < N; ++i) per *= q;
    std::uint64_t total = 1;
    for (std::int64_t i = 0; i < r; ++i) total *= per;
    BigInt sum = 0;
    for (std::uint64_t code = 0; code < total; ++code) {
        std::uint64_t c = code;
        std::int64_t best = -N;  // all-zero tuple
        bool any = false;
        for (std::int64_t i = 0; i < r; ++i) {
            std::uint64_t tail = c % per;
            c /= per;
            for (std::int64_t k = 0; k < N; ++k, tail /= q)
                if (tail % q != 0) {
                    if (!any || -k > best) best = -k;
                    any = true;
                    break;
                }
        }
        sum += best;
    }
    return Rational(sum) / Rational(static_cast<std::int64_t>(total));
}

}  // namespace

TEST(Haar, ExactValues) {
    EXPECT_EQ(haar_log_integral(2, 1, 4).exact, -1);
    EXPECT_EQ(haar_log_integral(3, 1, 4).exact, Rational(-1, 2));
    EXPECT_EQ(haar_log_integral(2, 2, 4).exact, Rational(-1, 3));
    EXPECT_THROW(haar_log_integral(2, 0, 4), precondition_error);
    EXPECT_THROW(haar_log_integral(2, 1, 0), precondition_error);
}

TEST(Haar, BruteWithinTailBound) {
    for (std::uint64_t q : {2U, 3U, 4U, 5U}) {
        for (std::int64_t r = 1; r <= 3; ++r) {
            for (std::int64_t N = 1; N * r <= 12; ++N) {
                const auto h = haar_log_integral(q, r, N);
                EXPECT_EQ(h.exact, Rational(-1) / Rational(ipow(BigInt(q), static_cast<std::uint64_t>(r)) - 1));
                EXPECT_LE(abs(h.brute - h.exact), h.tail_bound) << q << " " << r << " " << N;
            }
        }
    }
}

TEST(Haar, HistogramMatchesTupleEnumeration) {
    for (std::uint64_t q : {2U, 3U}) {
        for (std::int64_t r = 1; r <= 3; ++r) {
            for (std::int64_t N = 1; N * r <= (q == 2 ? 12 : 8); ++N)
                EXPECT_EQ(haar_log_integral(q, r, N).brute, haar_by_tuples(q, r, N)) << q << " " << r << " " << N;
        }
    }
}

TEST(Lattice, Examples) {
    auto F = Field::prime(2);
    const FqElem one = F->one(), zero = F->zero();
    auto c1 = lattice_count(T(F, "t^2"), {{one}}, {1}, true);
    EXPECT_EQ(c1.formula, 2);
    EXPECT_EQ(*c1.brute, 2);
    for (FqElem a : {zero, one}) {
        auto c2 = lattice_count(T(F, "t^2+t+1"), {{a}}, {1}, true);
        EXPECT_EQ(c2.formula, 2);
        EXPECT_EQ(*c2.brute, 2);
    }
    EXPECT_EQ(lattice_count(T(F, "t^3"), {{}}, {0}).formula, 8);
    EXPECT_THROW(lattice_count(T(F, "t^2"), {{one, one, one}}, {3}), precondition_error);
    EXPECT_THROW(lattice_count(T(F, "t^2"), {{one}}, {2}), precondition_error);
}

TEST(Lattice, LaurentTail) {
    auto F = Field::prime(3);
    // 1/(t-1) = t^-1 + t^-2 + ...
    auto tail = laurent_tail(Poly::one(F), T(F, "t-1"), 4);
    for (auto c : tail) EXPECT_EQ(c, F->one());
    // t/t^2 = t^-1.
    auto t2 = laurent_tail(Poly::t(F), T(F, "t^2"), 3);
    EXPECT_EQ(t2[0], F->one());
    EXPECT_EQ(t2[1], F->zero());
}

TEST(Lattice, FormulaMatchesEnumeration) {
    std::mt19937_64 rng(1234);
    std::int64_t mismatches = 0;
    for (std::uint32_t p : {2U, 3U}) {
        auto F = Field::prime(p);
        for (std::size_t d = 1; d <= 4; ++d) {
            for (int trial = 0; trial < 3; ++trial) {
                const Poly Q = trial == 0 ? pow(Poly::t(F), d) : random_monic(F, d, rng);
                for (std::int64_t n = 0; n <= static_cast<std::int64_t>(d); ++n) {
                    for (int s = 0; s < 10; ++s) {
                        std::vector<FqElem> tail(static_cast<std::size_t>(n));
                        for (auto& c : tail) c = F->random(rng);
                        auto c = lattice_count(Q, {tail}, {n}, true);
                        if (*c.brute != c.formula) ++mismatches;
                    }
                }
            }
        }
    }
    EXPECT_EQ(mismatches, 0);
}

TEST(Lattice, RankTwoProduct) {
    auto F = Field::prime(2);
    std::mt19937_64 rng(5);
    const Poly Q = T(F, "t^3+t+1");
    for (int s = 0; s < 10; ++s) {
        std::vector<FqElem> a{F->random(rng), F->random(rng)}, b{F->random(rng)};
        auto c = lattice_count(Q, {a, b}, {2, 1}, true);
        EXPECT_EQ(c.formula, 8);
        EXPECT_EQ(*c.brute, 8);
    }
}

TEST(Lattice, MonicOnlyDiffersFromFormula) {
    auto F = Field::prime(3);
    auto c = lattice_count(T(F, "t^2"), {{F->zero()}}, {1}, true, true);
    EXPECT_EQ(c.formula, 3);
    EXPECT_EQ(*c.brute, 3);
    // P / t^2 with no t^-1 term: P constant, and the only monic one is 1.
    EXPECT_EQ(*c.monic_only, 1);
    EXPECT_EQ(*lattice_count(T(F, "t^2"), {{F->one()}}, {1}, false, true).monic_only, 3);
}

TEST(Shells, CarlitzTorsion) {
    auto F = Field::prime(3);
    auto C = DrinfeldModule::carlitz(F);
    auto rep = packet_ball_report(C, T(F, "t^3"), RatFunc(F));
    ASSERT_EQ(rep.rows.size(), 3U);
    EXPECT_EQ(rep.rows[0].log_radius, Rational(-3, 2));
    EXPECT_EQ(rep.rows[0].count, 2);
    EXPECT_EQ(rep.rows[1].count, 6);
    EXPECT_EQ(rep.rows[2].count, 18);
    EXPECT_EQ(rep.deflated, 1);
    EXPECT_EQ(rep.packet_size, 27);
    EXPECT_EQ(rep.rows[2].packet_fraction, 1);
    EXPECT_EQ(*rep.rows[0].ball_mass, Rational(1, 9));

    for (std::uint64_t n = 1; n <= 5; ++n) {
        auto r = packet_ball_report(C, pow(Poly::t(F), n), RatFunc(F));
        ASSERT_EQ(r.rows.size(), n);
        for (std::size_t k = 1; k < r.rows.size(); ++k) {
            EXPECT_EQ(r.rows[k].count, 3 * r.rows[k - 1].count);
            EXPECT_GE(r.rows[k].cumulative_count, r.rows[k - 1].cumulative_count);
        }
        // Closed ball of log-radius -(2k-1)/2 holds q^{n-k} - 1 points.
        for (std::uint64_t k = 1; k <= n; ++k) {
            std::int64_t inside = 0;
            for (const auto& row : r.rows)
                if (row.log_radius <= Rational(-(2 * static_cast<std::int64_t>(k) - 1), 2)) inside = row.cumulative_count;
            std::int64_t expected = 1;
            for (std::uint64_t i = 0; i < n - k; ++i) expected *= 3;
            EXPECT_EQ(inside, expected - 1) << "n=" << n << " k=" << k;
        }
        for (const auto& row : r.rows) {
            EXPECT_GE(row.packet_fraction, 0);
            EXPECT_LE(row.packet_fraction, 1);
        }
    }
    EXPECT_TRUE(packet_ball_report(C, Poly::from_int(F, 1), RatFunc(F)).rows.empty());
}

TEST(Shells, NonzeroBase) {
    auto F = Field::prime(3);
    auto C = DrinfeldModule::carlitz(F);
    auto rep = packet_ball_report(C, Poly::t(F), RatFunc::from_int(F, 1));
    EXPECT_EQ(rep.deflated, 0);
    EXPECT_EQ(rep.packet_size, 3);
    EXPECT_EQ(rep.rows.back().cumulative_count, 3);
}

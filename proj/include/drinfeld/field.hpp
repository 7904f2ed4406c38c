#pragma once

#include <compare>
#include <cstdint>
#include <memory>
#include <numeric>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "error.hpp"

namespace drinfeld {

/// An element of F_q, stored as the base-p integer sum c_i p^i of its
/// polynomial-basis coordinates. Meaningful only together with its Field.
struct FqElem {
    std::uint32_t code = 0;

    constexpr bool is_zero() const noexcept { return code == 0; }
    friend constexpr auto operator<=>(FqElem, FqElem) = default;
};

/// F_q with q = p^e. The modulus (low degree first, monic, length e + 1) is
/// required when e > 1 and must be irreducible over F_p.
struct FqConfig {
    std::uint32_t p = 2;
    std::uint32_t e = 1;
    std::vector<std::uint32_t> modulus;

    friend bool operator==(const FqConfig&, const FqConfig&) = default;
};

namespace detail {

inline bool is_prime(std::uint64_t n) {
    if (n < 2) return false;
    for (std::uint64_t d = 2; d * d <= n; ++d)
        if (n % d == 0) return false;
    return true;
}

inline std::vector<std::uint64_t> prime_factors(std::uint64_t n) {
    std::vector<std::uint64_t> out;
    for (std::uint64_t d = 2; d * d <= n; ++d) {
        if (n % d == 0) {
            out.push_back(d);
            while (n % d == 0) n /= d;
        }
    }
    if (n > 1) out.push_back(n);
    return out;
}

// Remainder of a by monic b over F_p, dense vectors low degree first.
inline std::vector<std::uint32_t> small_mod(std::vector<std::uint32_t> a, const std::vector<std::uint32_t>& b,
                                            std::uint32_t p) {
    const std::size_t db = b.size() - 1;
    while (!a.empty() && a.back() == 0) a.pop_back();
    while (a.size() > db) {
        const std::uint64_t lead = a.back();
        const std::size_t shift = a.size() - 1 - db;
        for (std::size_t i = 0; i <= db; ++i) {
            a[shift + i] = static_cast<std::uint32_t>((a[shift + i] + (p - lead) * b[i]) % p);
        }
        while (!a.empty() && a.back() == 0) a.pop_back();
    }
    return a;
}

}  // namespace detail

class Field;
using FieldPtr = std::shared_ptr<const Field>;

class Field {
public:
    static FieldPtr make(FqConfig config) {
        if (!detail::is_prime(config.p) || config.p >= (1U << 31))
            throw precondition_error("field characteristic must be a prime below 2^31");
        if (config.e == 0) throw precondition_error("extension degree must be at least 1");
        if (config.e == 1) {
            config.modulus.clear();
            return FieldPtr(new Field(std::move(config)));
        }
        std::uint64_t q = 1;
        for (std::uint32_t i = 0; i < config.e; ++i) {
            q *= config.p;
            if (q > (1U << 20)) throw precondition_error("extension fields are limited to q <= 2^20");
        }
        if (config.modulus.size() != config.e + 1 || config.modulus.back() != 1)
            throw precondition_error("modulus must be monic of degree e");
        for (auto c : config.modulus)
            if (c >= config.p) throw precondition_error("modulus coefficients must lie in [0, p)");
        return FieldPtr(new Field(std::move(config)));
    }

    static FieldPtr prime(std::uint32_t p) { return make(FqConfig{p, 1, {}}); }

    const FqConfig& config() const noexcept { return config_; }
    std::uint32_t p() const noexcept { return config_.p; }
    std::uint32_t e() const noexcept { return config_.e; }
    std::uint64_t q() const noexcept { return q_; }
    bool is_prime_field() const noexcept { return config_.e == 1; }

    friend bool operator==(const Field& a, const Field& b) { return &a == &b || a.config_ == b.config_; }

    FqElem zero() const noexcept { return {}; }
    FqElem one() const noexcept { return {1}; }

    /// Image of an integer in the prime subfield.
    FqElem from_int(std::int64_t n) const {
        std::int64_t r = n % static_cast<std::int64_t>(config_.p);
        if (r < 0) r += config_.p;
        return {static_cast<std::uint32_t>(r)};
    }

    FqElem from_coordinates(std::span<const std::int64_t> coords) const {
        if (coords.size() > config_.e) throw parse_error("too many basis coordinates for F_q");
        std::uint64_t code = 0;
        for (std::size_t i = coords.size(); i-- > 0;) code = code * config_.p + from_int(coords[i]).code;
        return {static_cast<std::uint32_t>(code)};
    }

    std::vector<std::uint32_t> coordinates(FqElem a) const {
        std::vector<std::uint32_t> out(config_.e);
        std::uint32_t c = a.code;
        for (auto& x : out) {
            x = c % config_.p;
            c /= config_.p;
        }
        return out;
    }

    FqElem add(FqElem a, FqElem b) const noexcept {
        if (is_prime_field()) {
            std::uint64_t s = std::uint64_t{a.code} + b.code;
            return {static_cast<std::uint32_t>(s >= config_.p ? s - config_.p : s)};
        }
        if (!add_table_.empty()) return {add_table_[std::size_t{a.code} * q_ + b.code]};
        return digitwise(a, b, false);
    }

    FqElem neg(FqElem a) const noexcept {
        if (a.code == 0) return a;
        if (is_prime_field()) return {config_.p - a.code};
        return digitwise(FqElem{}, a, true);
    }

    FqElem sub(FqElem a, FqElem b) const noexcept { return add(a, neg(b)); }

    FqElem mul(FqElem a, FqElem b) const noexcept {
        if (a.code == 0 || b.code == 0) return {};
        if (is_prime_field())
            return {static_cast<std::uint32_t>(std::uint64_t{a.code} * b.code % config_.p)};
        std::uint64_t s = std::uint64_t{log_[a.code]} + log_[b.code];
        if (s >= q_ - 1) s -= q_ - 1;
        return {exp_[s]};
    }

    FqElem inv(FqElem a) const {
        if (a.code == 0) throw division_by_zero();
        if (is_prime_field()) return pow(a, config_.p - 2);
        std::uint32_t l = log_[a.code];
        return {exp_[l == 0 ? 0 : (q_ - 1) - l]};
    }

    FqElem div(FqElem a, FqElem b) const { return mul(a, inv(b)); }

    FqElem pow(FqElem a, std::uint64_t n) const noexcept {
        FqElem result = one();
        while (n) {
            if (n & 1U) result = mul(result, a);
            n >>= 1U;
            if (n) a = mul(a, a);
        }
        return result;
    }

    /// Unique p-th root (Frobenius is bijective on F_q).
    FqElem pth_root(FqElem a) const noexcept { return pow(a, q_ / config_.p); }

    template <class Rng>
    FqElem random(Rng& rng) const {
        std::uniform_int_distribution<std::uint64_t> dist(0, q_ - 1);
        return {static_cast<std::uint32_t>(dist(rng))};
    }

    template <class Rng>
    FqElem random_nonzero(Rng& rng) const {
        std::uniform_int_distribution<std::uint64_t> dist(1, q_ - 1);
        return {static_cast<std::uint32_t>(dist(rng))};
    }

private:
    explicit Field(FqConfig config) : config_(std::move(config)) {
        q_ = 1;
        for (std::uint32_t i = 0; i < config_.e; ++i) q_ *= config_.p;
        if (config_.e > 1) build_tables();
    }

    FqElem digitwise(FqElem a, FqElem b, bool negate_b) const noexcept {
        std::uint32_t x = a.code, y = b.code, out = 0, scale = 1;
        const std::uint32_t p = config_.p;
        for (std::uint32_t i = 0; i < config_.e; ++i) {
            std::uint32_t dx = x % p, dy = y % p;
            if (negate_b && dy) dy = p - dy;
            std::uint32_t s = dx + dy;
            if (s >= p) s -= p;
            out += s * scale;
            scale *= p;
            x /= p;
            y /= p;
        }
        return {out};
    }

    // Multiply two codes as polynomials modulo the modulus (table construction only).
    std::uint32_t slow_mul(std::uint32_t a, std::uint32_t b) const {
        const std::uint32_t p = config_.p, e = config_.e;
        std::vector<std::uint32_t> x(e), y(e), prod(2 * e - 1, 0);
        for (std::uint32_t i = 0; i < e; ++i) {
            x[i] = a % p;
            a /= p;
            y[i] = b % p;
            b /= p;
        }
        for (std::uint32_t i = 0; i < e; ++i)
            for (std::uint32_t j = 0; j < e; ++j)
                prod[i + j] = static_cast<std::uint32_t>((prod[i + j] + std::uint64_t{x[i]} * y[j]) % p);
        prod = detail::small_mod(std::move(prod), config_.modulus, p);
        std::uint32_t code = 0;
        for (std::size_t i = prod.size(); i-- > 0;) code = code * p + prod[i];
        return code;
    }

    void check_modulus_irreducible() const {
        // Trial division by every monic polynomial of degree 1..e/2.
        const std::uint32_t p = config_.p, e = config_.e;
        for (std::uint32_t d = 1; d <= e / 2; ++d) {
            std::uint64_t count = 1;
            for (std::uint32_t i = 0; i < d; ++i) count *= p;
            for (std::uint64_t k = 0; k < count; ++k) {
                std::vector<std::uint32_t> divisor(d + 1);
                std::uint64_t c = k;
                for (std::uint32_t i = 0; i < d; ++i) {
                    divisor[i] = static_cast<std::uint32_t>(c % p);
                    c /= p;
                }
                divisor[d] = 1;
                if (detail::small_mod(config_.modulus, divisor, p).empty())
                    throw precondition_error("modulus is reducible over F_p");
            }
        }
    }

    void build_tables() {
        check_modulus_irreducible();
        const std::uint64_t order = q_ - 1;
        const auto factors = detail::prime_factors(order);
        std::uint32_t generator = 0;
        for (std::uint32_t g = 2; g < q_ && generator == 0; ++g) {
            bool primitive = true;
            for (auto f : factors) {
                std::uint64_t n = order / f;
                std::uint32_t acc = 1, base = g;
                while (n) {
                    if (n & 1U) acc = slow_mul(acc, base);
                    n >>= 1U;
                    if (n) base = slow_mul(base, base);
                }
                if (acc == 1) {
                    primitive = false;
                    break;
                }
            }
            if (primitive) generator = g;
        }
        if (generator == 0) throw precondition_error("no primitive element found; modulus not irreducible");
        exp_.assign(order, 0);
        log_.assign(q_, 0);
        std::uint32_t x = 1;
        for (std::uint64_t k = 0; k < order; ++k) {
            exp_[k] = x;
            log_[x] = static_cast<std::uint32_t>(k);
            x = slow_mul(x, generator);
        }
        if (q_ <= 256) {
            add_table_.resize(q_ * q_);
            for (std::uint32_t a = 0; a < q_; ++a)
                for (std::uint32_t b = 0; b < q_; ++b) add_table_[std::size_t{a} * q_ + b] = digitwise({a}, {b}, false).code;
        }
    }

    FqConfig config_;
    std::uint64_t q_ = 0;
    std::vector<std::uint32_t> exp_;
    std::vector<std::uint32_t> log_;
    std::vector<std::uint32_t> add_table_;
};

inline void require_same_field(const FieldPtr& a, const FieldPtr& b) {
    if (a.get() != b.get() && !(*a == *b)) throw field_mismatch();
}

}  // namespace drinfeld

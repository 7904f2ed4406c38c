#pragma once

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "factor.hpp"
#include "rational.hpp"
#include "ratfunc.hpp"
#include "text.hpp"

namespace drinfeld {

/// A place of F_q(t): the infinite place or a monic irreducible pi.
class Place {
public:
    static Place infinity() { return Place(); }

    /// Validates that pi is monic irreducible.
    static Place finite(const Poly& pi) {
        if (pi.is_constant() || !pi.is_monic() || !is_irreducible(pi))
            throw precondition_error("finite place needs a monic irreducible polynomial, got " + to_string(pi));
        return Place(pi);
    }

    /// Skips the irreducibility check; pi must come from a factorization.
    static Place finite_unchecked(Poly pi) { return Place(std::move(pi)); }

    bool is_infinite() const noexcept { return !pi_.has_value(); }
    const Poly& pi() const {
        if (!pi_) throw precondition_error("the infinite place has no uniformizer polynomial");
        return *pi_;
    }
    std::int64_t degree() const { return pi_ ? static_cast<std::int64_t>(pi_->deg()) : 1; }

    friend bool operator==(const Place& a, const Place& b) noexcept { return a.pi_ == b.pi_; }

    /// Infinite first, then by degree, then lexicographic on coefficients.
    friend std::strong_ordering operator<=>(const Place& a, const Place& b) noexcept {
        if (a.is_infinite() || b.is_infinite()) return b.is_infinite() <=> a.is_infinite();
        return *a.pi_ <=> *b.pi_;
    }

private:
    Place() = default;
    explicit Place(Poly pi) : pi_(std::move(pi)) {}

    std::optional<Poly> pi_;
};

inline std::string to_string(const Place& v) { return v.is_infinite() ? "inf" : to_string(v.pi()); }

inline Place parse_place(const FieldPtr& F, std::string_view text) {
    if (text == "inf" || text == "infinity") return Place::infinity();
    return Place::finite(parse_poly(F, text));
}

using PlaceSet = std::set<Place>;

inline std::string to_string(const PlaceSet& S) {
    std::string s;
    for (const auto& v : S) {
        if (!s.empty()) s += ',';
        s += to_string(v);
    }
    return s;
}

/// Comma separated; "" is the empty set.
inline PlaceSet parse_place_set(const FieldPtr& F, std::string_view text) {
    PlaceSet S;
    std::size_t start = 0;
    while (start < text.size()) {
        std::size_t comma = text.find(',', start);
        if (comma == std::string_view::npos) comma = text.size();
        std::string_view item = text.substr(start, comma - start);
        while (!item.empty() && item.front() == ' ') item.remove_prefix(1);
        while (!item.empty() && item.back() == ' ') item.remove_suffix(1);
        if (!item.empty()) S.insert(parse_place(F, item));
        start = comma + 1;
    }
    return S;
}

// ---------------------------------------------------------------------------
// Valuations

inline std::int64_t valuation(const RatFunc& x, const Place& v) {
    if (x.is_zero()) throw infinite_valuation();
    require_same_field(x.field(), v.is_infinite() ? x.field() : v.pi().field());
    if (v.is_infinite())
        return static_cast<std::int64_t>(x.den().deg()) - static_cast<std::int64_t>(x.num().deg());
    return strip_factor(x.num(), v.pi()).first - strip_factor(x.den(), v.pi()).first;
}

inline std::int64_t valuation(const Poly& x, const Place& v) { return valuation(RatFunc(x), v); }

/// log|x|_v = -valuation * degree(v), normalized so log|t|_inf = 1.
inline Rational log_abs(const RatFunc& x, const Place& v) { return Rational(-valuation(x, v) * v.degree()); }

/// log+ |x|_v = max(0, log|x|_v); zero maps to 0.
inline Rational log_plus(const RatFunc& x, const Place& v) {
    if (x.is_zero()) return 0;
    Rational l = log_abs(x, v);
    return l > 0 ? l : Rational(0);
}

// ---------------------------------------------------------------------------
// Factorization gateway. Everything downstream that needs the places dividing
// a polynomial goes through prime_divisors(); results are memoized.

namespace detail {

struct FactorMemo {
    std::mutex mutex;
    std::map<std::vector<std::uint32_t>, std::vector<Poly>> table;
};

inline FactorMemo& factor_memo() {
    static FactorMemo memo;
    return memo;
}

// Content-addressed files under $DRINFELD_CACHE: the first line repeats the
// key, each further line is one prime as coefficient codes.
inline std::optional<std::filesystem::path> cache_path(const std::vector<std::uint32_t>& key) {
    const char* dir = std::getenv("DRINFELD_CACHE");
    if (dir == nullptr || *dir == '\0') return std::nullopt;
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (auto k : key) {
        for (int b = 0; b < 4; ++b) {
            h ^= (k >> (8 * b)) & 0xffU;
            h *= 0x100000001b3ULL;
        }
    }
    std::ostringstream name;
    name << std::hex << h << ".txt";
    return std::filesystem::path(dir) / name.str();
}

inline std::string join_codes(const std::vector<std::uint32_t>& codes) {
    std::string s;
    for (auto c : codes) {
        if (!s.empty()) s += ' ';
        s += std::to_string(c);
    }
    return s;
}

inline std::optional<std::vector<Poly>> cache_load(const FieldPtr& F, const std::vector<std::uint32_t>& key) {
    auto path = cache_path(key);
    if (!path) return std::nullopt;
    std::ifstream in(*path);
    std::string line;
    if (!in || !std::getline(in, line) || line != join_codes(key)) return std::nullopt;
    std::vector<Poly> primes;
    while (std::getline(in, line)) {
        std::istringstream row(line);
        std::vector<FqElem> c;
        std::uint32_t code = 0;
        while (row >> code) {
            if (code >= F->q()) return std::nullopt;
            c.push_back(FqElem{code});
        }
        primes.emplace_back(F, std::move(c));
    }
    return primes;
}

inline void cache_store(const std::vector<std::uint32_t>& key, const std::vector<Poly>& primes) {
    auto path = cache_path(key);
    if (!path) return;
    std::error_code ec;
    std::filesystem::create_directories(path->parent_path(), ec);
    auto tmp = *path;
    tmp += ".tmp" + std::to_string(std::hash<std::thread::id>{}(std::this_thread::get_id()));
    {
        std::ofstream out(tmp);
        if (!out) return;
        out << join_codes(key) << '\n';
        for (const auto& pi : primes) {
            std::vector<std::uint32_t> codes;
            for (auto c : pi.coefficients()) codes.push_back(c.code);
            out << join_codes(codes) << '\n';
        }
    }
    std::filesystem::rename(tmp, *path, ec);
    if (ec) std::filesystem::remove(tmp, ec);
}

}  // namespace detail

/// Distinct monic irreducible divisors of a nonzero polynomial, sorted.
inline std::vector<Poly> prime_divisors(const Poly& f) {
    if (f.is_zero()) throw infinite_valuation();
    if (f.is_constant()) return {};
    // Key: p, e, modulus, then coefficient codes.
    const FqConfig& cfg = f.field()->config();
    std::vector<std::uint32_t> map_key{cfg.p, cfg.e};
    map_key.insert(map_key.end(), cfg.modulus.begin(), cfg.modulus.end());
    for (auto c : f.coefficients()) map_key.push_back(c.code);
    auto& memo = detail::factor_memo();
    {
        std::lock_guard lock(memo.mutex);
        if (auto it = memo.table.find(map_key); it != memo.table.end()) return it->second;
    }
    std::vector<Poly> primes;
    if (auto cached = detail::cache_load(f.field(), map_key)) {
        primes = std::move(*cached);
    } else {
        for (auto& fac : factor(f).factors) primes.push_back(std::move(fac.poly));
        detail::cache_store(map_key, primes);
    }
    std::lock_guard lock(memo.mutex);
    memo.table.emplace(std::move(map_key), primes);
    return primes;
}

/// Places with nonzero valuation; Infinite iff deg num != deg den.
inline PlaceSet support(const RatFunc& x) {
    if (x.is_zero()) throw infinite_valuation();
    PlaceSet S;
    for (auto& pi : prime_divisors(x.num())) S.insert(Place::finite_unchecked(std::move(pi)));
    for (auto& pi : prime_divisors(x.den())) S.insert(Place::finite_unchecked(std::move(pi)));
    if (x.num().deg() != x.den().deg()) S.insert(Place::infinity());
    return S;
}

/// Finite places dividing a nonzero polynomial.
inline PlaceSet finite_places_dividing(const Poly& f) {
    PlaceSet S;
    for (auto& pi : prime_divisors(f)) S.insert(Place::finite_unchecked(std::move(pi)));
    return S;
}

}  // namespace drinfeld

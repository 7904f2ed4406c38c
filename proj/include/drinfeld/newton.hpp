#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <utility>
#include <vector>

#include "drinfeld_module.hpp"

namespace drinfeld {

// Sign convention: lower convex hull of (exponent, valuation) points, segments
// ordered by increasing slope. A segment of slope s and length l carries l
// roots of valuation -s, i.e. log-value s * degree(v).

struct NewtonSegment {
    Rational slope;
    std::int64_t length = 0;

    friend bool operator==(const NewtonSegment&, const NewtonSegment&) = default;
};

struct NewtonPolygon {
    std::vector<std::pair<std::int64_t, std::int64_t>> points;  // (exponent, valuation), nonzero coefficients only
    std::vector<std::pair<std::int64_t, std::int64_t>> hull;
    std::vector<NewtonSegment> segments;
};

inline NewtonPolygon newton_polygon(const SparsePoly& f, const Place& v) {
    if (f.is_zero()) throw precondition_error("Newton polygon of the zero polynomial");
    NewtonPolygon np;
    for (const auto& term : f.terms()) {
        if (term.exponent > static_cast<std::uint64_t>(INT64_MAX)) throw precondition_error("exponent too large");
        np.points.emplace_back(static_cast<std::int64_t>(term.exponent), valuation(term.coeff, v));
    }
    // Monotone chain, exact integer cross products; collinear vertices are dropped.
    for (const auto& pt : np.points) {
        while (np.hull.size() >= 2) {
            const auto& a = np.hull[np.hull.size() - 2];
            const auto& b = np.hull.back();
            const __int128 cross = static_cast<__int128>(b.first - a.first) * (pt.second - a.second) -
                                   static_cast<__int128>(b.second - a.second) * (pt.first - a.first);
            if (cross > 0) break;
            np.hull.pop_back();
        }
        np.hull.push_back(pt);
    }
    for (std::size_t i = 1; i < np.hull.size(); ++i) {
        const auto& [x0, y0] = np.hull[i - 1];
        const auto& [x1, y1] = np.hull[i];
        np.segments.push_back({make_rational(y1 - y0, x1 - x0), x1 - x0});
    }
    return np;
}

struct ProfileEntry {
    Rational log_value;
    std::int64_t multiplicity = 0;

    friend bool operator==(const ProfileEntry&, const ProfileEntry&) = default;
};

/// A root of the analyzed polynomial known to lie in F_q(t).
struct RationalRoot {
    RatFunc root;
    Rational log_value;
};

/// Multiset of log|root|_v over the nonzero roots of a polynomial at one place.
/// `entries` is the full multiset (ascending, distinct log-values);
/// `rational_roots` lists the K-rational roots separately (they are also
/// counted in `entries`). Roots at zero are counted in `zero_roots` only.
struct ValuationProfile {
    Place place;
    std::vector<ProfileEntry> entries;
    std::int64_t zero_roots = 0;
    std::vector<RationalRoot> rational_roots;

    std::int64_t root_count() const {
        std::int64_t n = 0;
        for (const auto& e : entries) n += e.multiplicity;
        return n;
    }

    /// Sum of log-values over all nonzero roots, with multiplicity.
    Rational log_sum() const {
        Rational s = 0;
        for (const auto& e : entries) s += e.log_value * e.multiplicity;
        return s;
    }

    /// Entries with the rational roots removed.
    std::vector<ProfileEntry> nonrational_entries() const {
        std::map<Rational, std::int64_t> m;
        for (const auto& e : entries) m[e.log_value] += e.multiplicity;
        for (const auto& r : rational_roots) {
            auto it = m.find(r.log_value);
            if (it == m.end() || it->second == 0) throw std::logic_error("rational root missing from profile");
            if (--it->second == 0) m.erase(it);
        }
        std::vector<ProfileEntry> out;
        for (const auto& [l, k] : m) out.push_back({l, k});
        return out;
    }

    std::optional<Rational> min_log() const {
        if (entries.empty()) return std::nullopt;
        return entries.front().log_value;
    }
};

inline ValuationProfile root_valuations(const SparsePoly& f, const Place& v) {
    const NewtonPolygon np = newton_polygon(f, v);
    ValuationProfile profile{v, {}, np.points.front().first, {}};
    const Rational deg(v.degree());
    for (const auto& seg : np.segments) profile.entries.push_back({seg.slope * deg, seg.length});
    return profile;
}

// ---------------------------------------------------------------------------
// Packets: the solutions gamma of Phi_Q(gamma) = alpha.

/// Precomputed data for the packet Phi_Q(X) = alpha around the base point beta.
struct Packet {
    DrinfeldModule module;
    Poly Q;
    RatFunc beta;
    RatFunc alpha;
    TwistedPoly phi_q;
    RatFunc offset;  // Phi_Q(beta) - alpha, nonzero

    /// Number of packet points, q^{r deg Q}.
    std::uint64_t size() const { return x_polynomial(phi_q).degree(); }

    /// K-rational members of the packet that are known without solving.
    std::vector<RatFunc> known_points() const {
        if (Q.is_constant()) return {alpha.scaled(module.field()->inv(Q.leading()))};
        if (alpha.is_zero()) return {RatFunc(module.field())};
        return {};
    }
};

inline Packet make_packet(const DrinfeldModule& M, const Poly& Q, const RatFunc& beta, const RatFunc& alpha) {
    if (Q.is_zero()) throw precondition_error("packet needs a nonzero Q");
    require_same_field(M.field(), Q.field());
    TwistedPoly phi_q = phi_of(M, Q);
    RatFunc offset = phi_q.apply(beta) - alpha;
    if (offset.is_zero())
        throw base_in_packet("Phi_Q(beta) equals alpha: the base point lies in the packet (Q = " + to_string(Q) + ")");
    return Packet{M, Q, beta, alpha, std::move(phi_q), std::move(offset)};
}

/// Polynomial P(X) = Phi_Q(X) - (Phi_Q(beta) - alpha) whose roots are beta - gamma.
inline SparsePoly distance_polynomial(const Packet& packet) {
    SparsePoly f = x_polynomial(packet.phi_q);
    f.add_term(0, -packet.offset);
    return f;
}

/// Polynomial Phi_Q(X) - alpha whose roots are the packet points gamma.
inline SparsePoly point_polynomial(const Packet& packet) {
    SparsePoly f = x_polynomial(packet.phi_q);
    if (!packet.alpha.is_zero()) f.add_term(0, -packet.alpha);
    return f;
}

/// Profile of log|beta - gamma|_v over all packet points gamma.
inline ValuationProfile distance_profile(const Packet& packet, const Place& v) {
    ValuationProfile profile = root_valuations(distance_polynomial(packet), v);
    for (const auto& gamma : packet.known_points()) {
        RatFunc root = packet.beta - gamma;
        profile.rational_roots.push_back({root, log_abs(root, v)});
    }
    return profile;
}

/// Profile of log|gamma|_v over the nonzero packet points.
inline ValuationProfile point_profile(const Packet& packet, const Place& v) {
    ValuationProfile profile = root_valuations(point_polynomial(packet), v);
    for (const auto& gamma : packet.known_points())
        if (!gamma.is_zero()) profile.rational_roots.push_back({gamma, log_abs(gamma, v)});
    return profile;
}

/// Multiset {log|beta - gamma|_v : Phi_Q(gamma) = alpha}.
inline ValuationProfile packet_distance_profile(const DrinfeldModule& M, const Poly& Q, const RatFunc& beta,
                                                const RatFunc& alpha, const Place& v) {
    return distance_profile(make_packet(M, Q, beta, alpha), v);
}

/// Finite places where the polygon of f can be non-flat: some coefficient
/// ratio c_i / c_lead is non-integral, or the lowest coefficient ratio is not a unit.
inline PlaceSet nonflat_finite_places(const SparsePoly& f) {
    if (f.is_zero()) throw precondition_error("zero polynomial");
    const RatFunc& lead = f.leading();
    Poly dens = Poly::one(f.field());
    for (const auto& term : f.terms()) {
        RatFunc ratio = term.coeff / lead;
        dens = dens * exact_div(ratio.den(), gcd(dens, ratio.den()));
    }
    PlaceSet S = finite_places_dividing(dens);
    RatFunc low = f.terms().front().coeff / lead;
    auto low_places = finite_places_dividing(low.num());
    S.insert(low_places.begin(), low_places.end());
    auto low_den = finite_places_dividing(low.den());
    S.insert(low_den.begin(), low_den.end());
    return S;
}

}  // namespace drinfeld

#pragma once

#include <fstream>
#include <set>
#include <string>

#include <json.hpp>

#include "equidist.hpp"
#include "integrality.hpp"

namespace drinfeld::io {

using nlohmann::json;

// ---------------------------------------------------------------------------
// Module definitions: {"p": 3, "e": 1, "r": 1, "a": ["1"], "modulus": [..]}

inline DrinfeldModule module_from_json(const json& j) {
    if (!j.is_object()) throw parse_error("module definition must be a JSON object");
    static const std::set<std::string> known{"p", "e", "r", "a", "modulus"};
    for (const auto& [key, _] : j.items())
        if (!known.contains(key)) throw precondition_error("unknown module field '" + key + "'");
    for (const char* key : {"p", "r", "a"})
        if (!j.contains(key)) throw precondition_error(std::string("module definition lacks '") + key + "'");
    FqConfig cfg;
    try {
        cfg.p = j.at("p").get<std::uint32_t>();
        cfg.e = j.value("e", 1U);
        if (j.contains("modulus")) cfg.modulus = j.at("modulus").get<std::vector<std::uint32_t>>();
    } catch (const json::exception& e) {
        throw parse_error(std::string("malformed field definition: ") + e.what());
    }
    const FieldPtr F = Field::make(cfg);
    if (!j.at("r").is_number_integer()) throw parse_error("'r' must be an integer");
    const auto r = j.at("r").get<std::int64_t>();
    if (!j.at("a").is_array()) throw parse_error("'a' must be an array of strings");
    if (r < 1) throw precondition_error("rank r must be at least 1");
    if (static_cast<std::size_t>(r) != j.at("a").size())
        throw precondition_error("'a' must list exactly r coefficients a_1..a_r");
    std::vector<RatFunc> a;
    for (const auto& item : j.at("a")) {
        if (!item.is_string()) throw parse_error("coefficients must be strings");
        a.push_back(parse_ratfunc(F, item.get<std::string>()));
    }
    return DrinfeldModule(F, std::move(a));
}

inline DrinfeldModule load_module(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw precondition_error("cannot open module file " + path);
    json j;
    try {
        j = json::parse(in);
    } catch (const json::parse_error& e) {
        throw parse_error("module file " + path + ": " + e.what());
    }
    return module_from_json(j);
}

inline json to_json(const DrinfeldModule& M) {
    const FqConfig& cfg = M.field()->config();
    json j{{"p", cfg.p}, {"e", cfg.e}, {"r", M.rank()}};
    if (cfg.e > 1) j["modulus"] = cfg.modulus;
    json a = json::array();
    for (const auto& c : M.coefficients()) a.push_back(to_string(c));
    j["a"] = std::move(a);
    return j;
}

// ---------------------------------------------------------------------------
// Results. Rationals and field elements are strings; maps have sorted keys.

inline json to_json(const Rational& x) { return to_string(x); }

inline json to_json(const Factorization& fac, const FieldPtr& F) {
    json factors = json::array();
    for (const auto& f : fac.factors) factors.push_back({{"poly", to_string(f.poly)}, {"exponent", f.exponent}});
    return {{"unit", to_string(*F, fac.unit)}, {"factors", std::move(factors)}};
}

inline json to_json(const LocalHeightResult& r) {
    json j;
    if (r.is_exact()) {
        j["kind"] = "exact";
        j["value"] = to_string(r.value);
    } else {
        j["kind"] = "bounded";
        j["lower"] = to_string(r.lower);
        j["upper"] = to_string(r.upper);
    }
    if (r.escape_step) j["escape_step"] = *r.escape_step;
    return j;
}

inline json to_json(const HeightBreakdown& h) {
    json places = json::array();
    for (const auto& [v, r] : h.per_place) {
        json row = to_json(r);
        row["place"] = to_string(v);
        places.push_back(std::move(row));
    }
    json j{{"exact", h.exact}, {"places", std::move(places)}};
    if (h.exact) {
        j["total"] = to_string(h.total);
    } else {
        j["lower"] = to_string(h.lower);
        j["upper"] = to_string(h.upper);
    }
    return j;
}

inline json to_json(const TorsionCertificate& c) {
    json j;
    switch (c.kind) {
        case TorsionCertificate::Kind::torsion:
            j["verdict"] = "torsion";
            j["annihilator"] = to_string(*c.annihilator);
            break;
        case TorsionCertificate::Kind::non_torsion:
            j["verdict"] = "non_torsion";
            j["witness"] = to_string(*c.witness);
            break;
        case TorsionCertificate::Kind::undecided: j["verdict"] = "undecided"; break;
    }
    j["step"] = c.step;
    return j;
}

inline json entries_to_json(const std::vector<ProfileEntry>& entries) {
    json out = json::array();
    for (const auto& e : entries) out.push_back({{"log", to_string(e.log_value)}, {"mult", e.multiplicity}});
    return out;
}

inline json to_json(const ValuationProfile& p) {
    json rational = json::array();
    for (const auto& r : p.rational_roots) rational.push_back({{"root", to_string(r.root)}, {"log", to_string(r.log_value)}});
    return {{"place", to_string(p.place)},
            {"entries", entries_to_json(p.entries)},
            {"zero_roots", p.zero_roots},
            {"rational_roots", std::move(rational)},
            {"log_sum", to_string(p.log_sum())}};
}

inline json to_json(const IntegralityVerdict& v) {
    json witnesses = json::array();
    for (const auto& w : v.witnesses)
        witnesses.push_back({{"place", to_string(w.place)}, {"log", to_string(w.log_value)}, {"mult", w.multiplicity}});
    json points = json::array();
    for (const auto& r : v.rational_points) points.push_back({{"point", to_string(r.point)}, {"s_integral", r.s_integral}});
    json profiles = json::array();
    for (const auto& c : v.checks) {
        json row = to_json(c.profile);
        row["branch"] = c.distance_branch ? "distance" : "size";
        row["violating"] = c.violating;
        row["total"] = c.total;
        profiles.push_back(std::move(row));
    }
    return {{"verdict", to_string(v.kind)},
            {"witnesses", std::move(witnesses)},
            {"rational_points", std::move(points)},
            {"profiles", std::move(profiles)}};
}

inline json to_json(const ScanReport& s) {
    json rows = json::array();
    for (const auto& row : s.rows) {
        json j = row.coincident ? json{{"verdict", "COINCIDENT"}} : to_json(row.verdict);
        j["Q"] = to_string(row.Q);
        rows.push_back(std::move(j));
    }
    json candidates = json::array();
    for (const auto& Q : s.candidates) candidates.push_back(to_string(Q));
    return {{"rows", std::move(rows)},
            {"counts", {{"ALL", s.count_all}, {"NONE", s.count_none}, {"INDETERMINATE", s.count_indeterminate}}},
            {"s_integral_candidates", std::move(candidates)}};
}

inline json to_json(const ConvergenceTable& t) {
    json columns = json::array();
    for (const auto& v : t.columns) columns.push_back(to_string(v));
    json rows = json::array();
    for (const auto& r : t.rows) {
        json cells = json::array();
        for (const auto& c : r.cells) cells.push_back(to_string(c));
        rows.push_back({{"Q", to_string(r.Q)}, {"cells", std::move(cells)}, {"others", to_string(r.others)},
                        {"row_sum", to_string(r.row_sum)}});
    }
    json limits = json::array();
    for (const auto& l : t.limits) limits.push_back(to_json(l));
    return {{"columns", std::move(columns)}, {"rows", std::move(rows)}, {"limits", std::move(limits)},
            {"global", to_json(t.global)}};
}

inline json to_json(const HaarIntegral& h) {
    return {{"exact", to_string(h.exact)}, {"brute", to_string(h.brute)}, {"tail_bound", to_string(h.tail_bound)},
            {"within_bound", abs(h.brute - h.exact) <= h.tail_bound}};
}

inline json to_json(const LatticeCount& c) {
    json j{{"formula", c.formula.str()}};
    if (c.brute) {
        j["brute"] = c.brute->str();
        j["agree"] = *c.brute == c.formula;
    }
    if (c.monic_only) j["monic_only"] = c.monic_only->str();
    return j;
}

inline json to_json(const ShellReport& s) {
    json rows = json::array();
    for (const auto& r : s.rows) {
        json row{{"log_radius", to_string(r.log_radius)},
                 {"count", r.count},
                 {"cumulative_count", r.cumulative_count},
                 {"packet_fraction", to_string(r.packet_fraction)}};
        row["ball_mass"] = r.ball_mass ? json(to_string(*r.ball_mass)) : json(nullptr);
        rows.push_back(std::move(row));
    }
    return {{"rows", std::move(rows)}, {"packet_size", s.packet_size}, {"deflated", s.deflated}};
}

inline json to_json(const BallBound& b) { return {{"s0_log", to_string(b.s0_log)}, {"n0", b.n0}}; }

inline json to_json(const BosserFit& f) {
    json rows = json::array();
    for (const auto& r : f.rows)
        rows.push_back({{"Q", to_string(r.Q)}, {"degree", r.degree}, {"min_log_distance", to_string(r.min_log_distance)}});
    return {{"rows", std::move(rows)},
            {"c0", f.c0},
            {"c1", f.c1},
            {"fit_rows", f.fit_rows},
            {"lower_bounds_hold", f.lower_bounds_hold}};
}

inline json to_json(const std::vector<SmallHeightRow>& rows) {
    json out = json::array();
    for (const auto& r : rows) {
        json terms = json::array();
        for (const auto& t : r.F.terms()) terms.push_back({{"exp", t.exponent}, {"coeff", to_string(t.coeff)}});
        out.push_back({{"n", r.n},
                       {"F", std::move(terms)},
                       {"avg_h", to_string(r.avg_h)},
                       {"U", to_string(r.U)},
                       {"verdict", to_string(r.verdict.kind)}});
    }
    return out;
}

}  // namespace drinfeld::io

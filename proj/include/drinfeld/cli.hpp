#pragma once

#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "io.hpp"

namespace drinfeld::cli {

using io::json;

inline constexpr int exit_ok = 0;
inline constexpr int exit_precondition = 2;
inline constexpr int exit_parse = 3;

namespace detail {

struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
};

inline std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string q = "\"";
    for (char c : s) {
        if (c == '"') q += '"';
        q += c;
    }
    return q + "\"";
}

inline std::string to_csv(const Table& t) {
    std::string out;
    auto line = [&](const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (i) out += ',';
            out += csv_field(cells[i]);
        }
        out += '\n';
    };
    line(t.header);
    for (const auto& r : t.rows) line(r);
    return out;
}

/// Split on commas outside brackets, so "[1,2],t" gives "[1,2]" and "t".
inline std::vector<std::string> split_top_level(const std::string& text, char sep = ',') {
    std::vector<std::string> parts;
    std::string cur;
    int depth = 0;
    for (char c : text) {
        if (c == '[' || c == '(') ++depth;
        if (c == ']' || c == ')') --depth;
        if (c == sep && depth == 0) {
            parts.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    if (!cur.empty() || !parts.empty()) parts.push_back(cur);
    return parts;
}

// Everything a verb may need; CLI11 binds the flags into these fields.
struct Options {
    std::string module_path;
    std::uint32_t carlitz = 0;
    std::uint32_t p = 0;
    std::uint32_t e = 1;
    std::string modulus;
    std::string out = "-";
    std::string format = "json";
    std::uint64_t seed = default_factor_seed;

    std::string poly, x, beta, alpha = "0", place = "inf", S, extra, Q;
    std::vector<std::string> Q_list, tails, places;
    std::vector<std::int64_t> depths, n_list;
    std::int64_t n_max = default_n_max;
    std::int64_t torsion_n_max = 64;
    std::int64_t max_deg = 0;
    std::int64_t powers = 0;
    std::uint64_t q = 0;
    std::int64_t r = 0, N = 0;
    unsigned threads = 0;
    bool brute = false, monic_only = false;
    std::string s_log;
    std::int64_t n = 1;
};

inline FieldPtr field_from(const Options& o) {
    if (!o.module_path.empty()) return io::load_module(o.module_path).field();
    if (o.carlitz != 0) return Field::prime(o.carlitz);
    if (o.p == 0) throw precondition_error("a field is required: --module, --carlitz or --p");
    FqConfig cfg{o.p, o.e, {}};
    if (!o.modulus.empty()) {
        for (const auto& part : split_top_level(o.modulus)) {
            try {
                cfg.modulus.push_back(static_cast<std::uint32_t>(std::stoul(part)));
            } catch (const std::exception&) {
                throw parse_error("malformed modulus coefficient '" + part + "'");
            }
        }
    }
    return Field::make(cfg);
}

inline DrinfeldModule module_from(const Options& o) {
    if (!o.module_path.empty()) return io::load_module(o.module_path);
    if (o.carlitz != 0) return DrinfeldModule::carlitz(Field::prime(o.carlitz));
    throw precondition_error("a module is required: --module FILE or --carlitz P");
}

inline std::vector<Poly> q_list_from(const Options& o, const FieldPtr& F) {
    std::vector<Poly> Qs;
    for (const auto& s : o.Q_list) Qs.push_back(parse_poly(F, s));
    for (std::int64_t n = 1; n <= o.powers; ++n) Qs.push_back(pow(Poly::t(F), static_cast<std::uint64_t>(n)));
    if (Qs.empty()) throw precondition_error("give --Q (repeatable) or --powers N");
    return Qs;
}

struct Result {
    json doc;
    std::optional<Table> table;
};

using Handler = std::function<Result(const Options&)>;

inline void add_module_opts(CLI::App* sub, Options& o) {
    sub->add_option("--module", o.module_path, "Module definition JSON file");
    sub->add_option("--carlitz", o.carlitz, "Use the Carlitz module over F_p");
}

inline void add_field_opts(CLI::App* sub, Options& o) {
    add_module_opts(sub, o);
    sub->add_option("--p", o.p, "Characteristic");
    sub->add_option("--e", o.e, "Extension degree");
    sub->add_option("--modulus", o.modulus, "Modulus coefficients, low degree first, comma separated");
}

inline Table height_table(const HeightBreakdown& h) {
    Table t{{"place", "kind", "value", "lower", "upper"}, {}};
    for (const auto& [v, r] : h.per_place)
        t.rows.push_back({to_string(v), r.is_exact() ? "exact" : "bounded", r.is_exact() ? to_string(r.value) : "",
                          to_string(r.lower), to_string(r.upper)});
    t.rows.push_back({"total", h.exact ? "exact" : "bounded", h.exact ? to_string(h.total) : "", to_string(h.lower),
                      to_string(h.upper)});
    return t;
}

// Apply a JSON config object as flags not already given on the command line.
inline std::vector<std::string> merge_config(const std::vector<std::string>& args, const std::string& path,
                                             std::string& verb) {
    std::ifstream in(path);
    if (!in) throw precondition_error("cannot open config file " + path);
    json cfg;
    try {
        cfg = json::parse(in);
    } catch (const json::parse_error& e) {
        throw parse_error("config file " + path + ": " + e.what());
    }
    if (!cfg.is_object()) throw parse_error("config must be a JSON object");
    std::vector<std::string> extra;
    auto given = [&](const std::string& flag) {
        for (const auto& a : args)
            if (a == flag || a.rfind(flag + "=", 0) == 0) return true;
        return false;
    };
    for (const auto& [key, value] : cfg.items()) {
        if (key == "command") {
            if (!value.is_string()) throw parse_error("'command' must be a string");
            if (verb.empty()) verb = value.get<std::string>();
            continue;
        }
        const std::string flag = "--" + key;
        if (given(flag)) continue;
        auto push = [&](const json& v) {
            if (v.is_string()) {
                extra.push_back(flag);
                extra.push_back(v.get<std::string>());
            } else if (v.is_boolean()) {
                if (v.get<bool>()) extra.push_back(flag);
            } else if (v.is_number()) {
                extra.push_back(flag);
                extra.push_back(v.dump());
            } else {
                throw parse_error("config value for '" + key + "' must be a string, number or boolean");
            }
        };
        if (value.is_array()) {
            for (const auto& item : value) push(item);
        } else {
            push(value);
        }
    }
    return extra;
}

}  // namespace detail

/// Run one CLI invocation. args excludes the program name.
inline int run(std::vector<std::string> args, std::ostream& out, std::ostream& err) {
    using detail::Options;
    using detail::Result;
    using detail::Table;
    Options o;
    CLI::App app{"Drinfeld module heights, packets and integrality", "drinfeld"};
    app.require_subcommand(1);
    std::map<CLI::App*, detail::Handler> handlers;
    std::vector<CLI::App*> subs;

    auto verb = [&](const std::string& name, const std::string& help, bool tabular, detail::Handler h) {
        CLI::App* sub = app.add_subcommand(name, help);
        sub->add_option("--out", o.out, "Output path, - for standard output");
        sub->add_option("--format", o.format, "json or csv")
            ->check(CLI::IsMember(tabular ? std::vector<std::string>{"json", "csv"} : std::vector<std::string>{"json"}));
        sub->add_option("--config", [](const CLI::results_t&) { return true; }, "JSON config file; flags override it");
        sub->add_option("--seed", o.seed, "Seed for randomized subroutines");
        handlers[sub] = std::move(h);
        subs.push_back(sub);
        return sub;
    };

    // factor
    auto* s = verb("factor", "Factor a polynomial over F_q", false, [](const Options& o) {
        const FieldPtr F = detail::field_from(o);
        const Poly f = parse_poly(F, o.poly);
        if (f.is_zero()) throw precondition_error("cannot factor the zero polynomial");
        return Result{io::to_json(factor(f, FactorOptions{o.seed}), F), std::nullopt};
    });
    detail::add_field_opts(s, o);
    s->add_option("--poly", o.poly, "Polynomial in t")->required();

    s = verb("height", "Global canonical height with per-place breakdown", true, [](const Options& o) {
        const DrinfeldModule M = detail::module_from(o);
        const HeightBreakdown h = global_canonical_height(M, parse_ratfunc(M.field(), o.x), o.n_max);
        return Result{io::to_json(h), detail::height_table(h)};
    });
    detail::add_module_opts(s, o);
    s->add_option("--x", o.x, "Point in F_q(t)")->required();
    s->add_option("--n-max", o.n_max, "Iteration cap");

    s = verb("local-height", "Local canonical height at one place", false, [](const Options& o) {
        const DrinfeldModule M = detail::module_from(o);
        const Place v = parse_place(M.field(), o.place);
        json j = io::to_json(local_canonical_height(M, parse_ratfunc(M.field(), o.x), v, o.n_max));
        j["place"] = to_string(v);
        return Result{j, std::nullopt};
    });
    detail::add_module_opts(s, o);
    s->add_option("--x", o.x, "Point in F_q(t)")->required();
    s->add_option("--place", o.place, "inf or a monic irreducible polynomial");
    s->add_option("--n-max", o.n_max, "Iteration cap");

    s = verb("torsion", "Torsion certificate", false, [](const Options& o) {
        const DrinfeldModule M = detail::module_from(o);
        return Result{io::to_json(torsion_test(M, parse_ratfunc(M.field(), o.x), o.torsion_n_max)), std::nullopt};
    });
    detail::add_module_opts(s, o);
    s->add_option("--x", o.x, "Point in F_q(t)")->required();
    s->add_option("--n-max", o.torsion_n_max, "Iteration cap");

    s = verb("packet-profile", "Profile of log|beta - gamma| over Phi_Q(gamma) = alpha", false, [](const Options& o) {
        const DrinfeldModule M = detail::module_from(o);
        const FieldPtr& F = M.field();
        const Poly Q = parse_poly(F, o.Q);
        const RatFunc beta = parse_ratfunc(F, o.beta);
        const Place v = parse_place(F, o.place);
        const ValuationProfile p = packet_distance_profile(M, Q, beta, parse_ratfunc(F, o.alpha), v);
        json j = io::to_json(p);
        j["Q"] = to_string(Q);
        j["beta"] = to_string(beta);
        j["packet_size"] = p.root_count() + p.zero_roots;
        return Result{j, std::nullopt};
    });
    detail::add_module_opts(s, o);
    s->add_option("--Q", o.Q, "Polynomial Q")->required();
    s->add_option("--beta", o.beta, "Base point")->required();
    s->add_option("--alpha", o.alpha, "Packet target alpha (default 0)");
    s->add_option("--place", o.place, "inf or a monic irreducible polynomial");

    s = verb("integrality", "Packet S-integrality verdict", false, [](const Options& o) {
        const DrinfeldModule M = detail::module_from(o);
        const FieldPtr& F = M.field();
        json j = io::to_json(packet_integrality_verdict(M, parse_poly(F, o.Q), parse_ratfunc(F, o.beta),
                                                        parse_place_set(F, o.S), parse_ratfunc(F, o.alpha)));
        j["Q"] = o.Q;
        return Result{j, std::nullopt};
    });
    detail::add_module_opts(s, o);
    s->add_option("--Q", o.Q, "Polynomial Q")->required();
    s->add_option("--beta", o.beta, "Base point")->required();
    s->add_option("--alpha", o.alpha, "Packet target alpha (default 0)");
    s->add_option("--S", o.S, "Places in S, comma separated");

    s = verb("scan", "Integrality verdicts for all monic Q up to a degree", true, [](const Options& o) {
        const DrinfeldModule M = detail::module_from(o);
        const FieldPtr& F = M.field();
        const ScanReport rep = integrality_scan(M, parse_ratfunc(F, o.beta), parse_place_set(F, o.S), o.max_deg,
                                                parse_ratfunc(F, o.alpha), o.threads);
        Table t{{"Q", "verdict", "witnesses"}, {}};
        for (const auto& row : rep.rows) {
            std::string w;
            for (const auto& x : row.verdict.witnesses) {
                if (!w.empty()) w += ';';
                w += to_string(x.place) + ":" + to_string(x.log_value) + "x" + std::to_string(x.multiplicity);
            }
            t.rows.push_back({to_string(row.Q), row.coincident ? "COINCIDENT" : to_string(row.verdict.kind), w});
        }
        json j = io::to_json(rep);
        j["beta"] = o.beta;
        j["S"] = o.S;
        j["max_deg"] = o.max_deg;
        return Result{j, t};
    });
    detail::add_module_opts(s, o);
    s->add_option("--beta", o.beta, "Base point")->required();
    s->add_option("--alpha", o.alpha, "Backward-orbit target (default 0)");
    s->add_option("--S", o.S, "Places in S, comma separated");
    s->add_option("--max-deg", o.max_deg, "Largest deg Q")->required();
    s->add_option("--threads", o.threads, "Worker threads (0 = hardware)");

    s = verb("convergence", "Per-place packet averages against local heights", true, [](const Options& o) {
        const DrinfeldModule M = detail::module_from(o);
        const FieldPtr& F = M.field();
        const ConvergenceTable tab = thm12_convergence_table(M, parse_ratfunc(F, o.beta), detail::q_list_from(o, F),
                                                             parse_place_set(F, o.extra), o.n_max);
        Table t{{"Q"}, {}};
        for (const auto& v : tab.columns) t.header.push_back(to_string(v));
        t.header.push_back("others");
        t.header.push_back("row_sum");
        for (const auto& r : tab.rows) {
            std::vector<std::string> cells{to_string(r.Q)};
            for (const auto& c : r.cells) cells.push_back(to_string(c));
            cells.push_back(to_string(r.others));
            cells.push_back(to_string(r.row_sum));
            t.rows.push_back(std::move(cells));
        }
        return Result{io::to_json(tab), t};
    });
    detail::add_module_opts(s, o);
    s->add_option("--beta", o.beta, "Base point")->required();
    s->add_option("--Q", o.Q_list, "Polynomial Q (repeatable)");
    s->add_option("--powers", o.powers, "Use Q = t, t^2, ..., t^N");
    s->add_option("--extra", o.extra, "Extra column places, comma separated");
    s->add_option("--n-max", o.n_max, "Iteration cap for the limit column");

    s = verb("haar", "Haar log-integral, exact and truncated", false, [](const Options& o) {
        return Result{io::to_json(haar_log_integral(o.q, o.r, o.N)), std::nullopt};
    });
    s->add_option("--q", o.q, "Field size")->required();
    s->add_option("--r", o.r, "Rank")->required();
    s->add_option("--N", o.N, "Truncation depth")->required();

    s = verb("count", "Lattice count of Laurent-tail matches", false, [](const Options& o) {
        const FieldPtr F = detail::field_from(o);
        const Poly Q = parse_poly(F, o.Q);
        std::vector<std::vector<FqElem>> tails;
        for (const auto& text : o.tails) {
            std::vector<FqElem> tail;
            for (const auto& item : detail::split_top_level(text)) {
                const RatFunc c = parse_ratfunc(F, item);
                if (!c.is_constant()) throw precondition_error("tail entries must be constants, got " + item);
                tail.push_back(c.num().coeff(0));
            }
            tails.push_back(std::move(tail));
        }
        std::vector<std::int64_t> depths = o.depths;
        if (depths.empty())
            for (const auto& tail : tails) depths.push_back(static_cast<std::int64_t>(tail.size()));
        json j = io::to_json(lattice_count(Q, tails, depths, o.brute, o.monic_only));
        j["Q"] = to_string(Q);
        return Result{j, std::nullopt};
    });
    detail::add_field_opts(s, o);
    s->add_option("--Q", o.Q, "Polynomial Q")->required();
    s->add_option("--tail", o.tails, "Coefficients of t^-1, t^-2, ... (repeat once per component)")->required();
    s->add_option("--depth", o.depths, "Depth per component (default: tail length)");
    s->add_flag("--brute", o.brute, "Cross-check by exhaustive enumeration");
    s->add_flag("--monic-only", o.monic_only, "Also count monic P only");

    s = verb("ball-report", "Shell statistics of Phi[Q] at the infinite place", true, [](const Options& o) {
        const DrinfeldModule M = detail::module_from(o);
        const ShellReport rep = packet_ball_report(M, parse_poly(M.field(), o.Q), parse_ratfunc(M.field(), o.beta));
        Table t{{"log_radius", "count", "cumulative_count", "packet_fraction", "ball_mass"}, {}};
        for (const auto& r : rep.rows)
            t.rows.push_back({to_string(r.log_radius), std::to_string(r.count), std::to_string(r.cumulative_count),
                              to_string(r.packet_fraction), r.ball_mass ? to_string(*r.ball_mass) : ""});
        return Result{io::to_json(rep), t};
    });
    detail::add_module_opts(s, o);
    s->add_option("--Q", o.Q, "Polynomial Q")->required();
    s->add_option("--beta", o.beta, "Base point (default 0)")->default_val("0");

    s = verb("example-ih", "Small-height S-integral sequence for the Carlitz module", true, [](const Options& o) {
        std::vector<std::int64_t> ns = o.n_list;
        if (ns.empty()) throw precondition_error("give --n (repeatable)");
        const auto rows = small_height_sequence(o.p, ns);
        Table t{{"n", "avg_h", "U", "verdict"}, {}};
        for (const auto& r : rows)
            t.rows.push_back({std::to_string(r.n), to_string(r.avg_h), to_string(r.U), to_string(r.verdict.kind)});
        return Result{json{{"p", o.p}, {"rows", io::to_json(rows)}}, t};
    });
    s->add_option("--p", o.p, "Odd prime")->required();
    s->add_option("--n", o.n_list, "Sequence indices (repeatable or comma separated)")->delimiter(',');

    s = verb("bosser", "Minimal packet distances at infinity with a fitted lower bound", true, [](const Options& o) {
        const DrinfeldModule M = detail::module_from(o);
        const BosserFit fit = bosser_report(M, parse_ratfunc(M.field(), o.beta), detail::q_list_from(o, M.field()));
        Table t{{"Q", "degree", "min_log_distance"}, {}};
        for (const auto& r : fit.rows) t.rows.push_back({to_string(r.Q), std::to_string(r.degree), to_string(r.min_log_distance)});
        return Result{io::to_json(fit), t};
    });
    detail::add_module_opts(s, o);
    s->add_option("--beta", o.beta, "Base point")->required();
    s->add_option("--Q", o.Q_list, "Polynomial Q (repeatable)");
    s->add_option("--powers", o.powers, "Use Q = t, t^2, ..., t^N");

    auto fail = [&](int code, const std::string& msg, const json& extra = json::object()) {
        json e = extra;
        e["error"] = msg;
        e["exit_code"] = code;
        err << e.dump() << '\n';
        return code;
    };

    try {
        // Config file handling happens before CLI11 sees the arguments.
        std::string config_path;
        std::string verb_name = !args.empty() && args[0].rfind("--", 0) != 0 ? args[0] : "";
        for (std::size_t i = 0; i < args.size(); ++i) {
            if (args[i] == "--config" && i + 1 < args.size()) config_path = args[i + 1];
            if (args[i].rfind("--config=", 0) == 0) config_path = args[i].substr(9);
        }
        if (!config_path.empty()) {
            const bool had_verb = !verb_name.empty();
            auto extra = detail::merge_config(args, config_path, verb_name);
            if (!had_verb) {
                if (verb_name.empty()) throw precondition_error("no verb given on the command line or in the config");
                args.insert(args.begin(), verb_name);
            }
            args.insert(args.end(), extra.begin(), extra.end());
        }
        if (!verb_name.empty()) {
            CLI::App* sub = nullptr;
            for (auto* candidate : subs)
                if (candidate->get_name() == verb_name) sub = candidate;
            if (sub == nullptr) throw precondition_error("unknown verb '" + verb_name + "'");
        }

        std::vector<std::string> reversed(args.rbegin(), args.rend());
        try {
            app.parse(reversed);
        } catch (const CLI::CallForHelp&) {
            out << app.help();
            return exit_ok;
        } catch (const CLI::CallForAllHelp&) {
            out << app.help();
            return exit_ok;
        } catch (const CLI::ConversionError& e) {
            return fail(exit_parse, e.what());
        } catch (const CLI::ParseError& e) {
            return fail(exit_precondition, e.what());
        }

        CLI::App* chosen = app.get_subcommands().front();
        Result result = handlers.at(chosen)(o);
        std::string text;
        if (o.format == "csv") {
            if (!result.table) throw precondition_error("this verb has no CSV form");
            text = detail::to_csv(*result.table);
        } else {
            result.doc["command"] = chosen->get_name();
            text = result.doc.dump(2) + "\n";
        }
        if (o.out == "-") {
            out << text;
        } else {
            std::ofstream file(o.out, std::ios::binary);
            if (!file) throw precondition_error("cannot write " + o.out);
            file << text;
        }
        return exit_ok;
    } catch (const parse_error& e) {
        return fail(exit_parse, e.what());
    } catch (const torsion_base& e) {
        return fail(exit_precondition, e.what(), json{{"annihilator", e.annihilator()}});
    } catch (const std::invalid_argument& e) {
        return fail(exit_precondition, e.what());
    } catch (const std::domain_error& e) {
        return fail(exit_precondition, e.what());
    }
}

inline int run(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
    std::vector<std::string> args;
    for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
    return run(std::move(args), out, err);
}

}  // namespace drinfeld::cli

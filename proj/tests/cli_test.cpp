#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <unistd.h>

#include "drinfeld/cli.hpp"

using namespace drinfeld;
using nlohmann::json;

namespace {

struct Outcome {
    int code;
    std::string out;
    std::string err;
};

Outcome call(std::vector<std::string> args) {
    std::ostringstream out, err;
    int code = cli::run(std::move(args), out, err);
    return {code, out.str(), err.str()};
}

class CliTest : public ::testing::Test {
protected:
    void SetUp() override {
        dir_ = std::filesystem::temp_directory_path() /
               ("drinfeld_cli_" + std::to_string(::getpid()) + "_" +
                ::testing::UnitTest::GetInstance()->current_test_info()->name());
        std::filesystem::create_directories(dir_);
        write("carlitz3.json", R"({"p": 3, "r": 1, "a": ["1"]})");
        write("carlitz2.json", R"({"p": 2, "r": 1, "a": ["1"]})");
    }
    void TearDown() override { std::filesystem::remove_all(dir_); }

    std::string write(const std::string& name, const std::string& text) {
        const auto path = (dir_ / name).string();
        std::ofstream(path) << text;
        return path;
    }
    std::string path(const std::string& name) const { return (dir_ / name).string(); }

    std::filesystem::path dir_;
};

}  // namespace

TEST_F(CliTest, HeightJson) {
    auto r = call({"height", "--module", path("carlitz3.json"), "--x", "1/t"});
    ASSERT_EQ(r.code, 0) << r.err;
    auto j = json::parse(r.out);
    EXPECT_EQ(j["total"], "10/9");
    EXPECT_EQ(j["places"][0]["place"], "inf");
    EXPECT_EQ(j["places"][0]["value"], "1/9");
    EXPECT_EQ(j["places"][1]["place"], "t");
    EXPECT_EQ(j["places"][1]["value"], "1");
}

TEST_F(CliTest, TorsionJson) {
    auto r = call({"torsion", "--module", path("carlitz2.json"), "--x", "t"});
    ASSERT_EQ(r.code, 0) << r.err;
    auto j = json::parse(r.out);
    EXPECT_EQ(j["verdict"], "torsion");
    EXPECT_EQ(j["annihilator"], "t");
}

TEST_F(CliTest, HaarJson) {
    auto r = call({"haar", "--q", "3", "--r", "1", "--N", "8"});
    ASSERT_EQ(r.code, 0) << r.err;
    auto j = json::parse(r.out);
    EXPECT_EQ(j["exact"], "-1/2");
    EXPECT_TRUE(j["within_bound"].get<bool>());
}

TEST_F(CliTest, ExitCodes) {
    EXPECT_EQ(call({"height", "--carlitz", "3", "--x", "1/(t"}).code, 3);
    EXPECT_EQ(call({"height", "--carlitz", "3", "--x", "1/0"}).code, 3);
    EXPECT_EQ(call({"scan", "--carlitz", "2", "--beta", "1", "--S", "inf", "--max-deg", "1"}).code, 2);
    EXPECT_EQ(call({"height", "--carlitz", "3"}).code, 2);  // missing --x
    EXPECT_EQ(call({"nonsense"}).code, 2);
    EXPECT_EQ(call({"haar", "--q", "three", "--r", "1", "--N", "2"}).code, 3);
    EXPECT_EQ(call({"haar", "--q", "3", "--r", "0", "--N", "2"}).code, 2);
    EXPECT_EQ(call({"--help"}).code, 0);
    auto torsion = call({"scan", "--carlitz", "2", "--beta", "t", "--S", "inf", "--max-deg", "1"});
    EXPECT_EQ(json::parse(torsion.err)["annihilator"], "t");
}

TEST_F(CliTest, InvalidModuleFiles) {
    write("reducible.json", R"({"p": 3, "e": 2, "modulus": [2, 0, 1], "r": 1, "a": ["1"]})");
    write("zero_lead.json", R"({"p": 3, "r": 1, "a": ["0"]})");
    write("unknown.json", R"({"p": 3, "r": 1, "a": ["1"], "color": "red"})");
    write("rank.json", R"({"p": 3, "r": 2, "a": ["1"]})");
    write("broken.json", R"({"p": 3, "r": )");
    write("badelem.json", R"({"p": 3, "r": 1, "a": ["t^"]})");
    for (const char* name : {"reducible.json", "zero_lead.json", "unknown.json", "rank.json"})
        EXPECT_EQ(call({"height", "--module", path(name), "--x", "1"}).code, 2) << name;
    EXPECT_EQ(call({"height", "--module", path("broken.json"), "--x", "1"}).code, 3);
    EXPECT_EQ(call({"height", "--module", path("badelem.json"), "--x", "1"}).code, 3);
    EXPECT_EQ(call({"height", "--module", path("missing.json"), "--x", "1"}).code, 2);
}

TEST_F(CliTest, ExtensionFieldModule) {
    write("f9.json", R"({"p": 3, "e": 2, "modulus": [1, 0, 1], "r": 1, "a": ["[0,1]"]})");
    auto r = call({"height", "--module", path("f9.json"), "--x", "[1,1]*t"});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_TRUE(json::parse(r.out)["exact"].get<bool>());
}

TEST_F(CliTest, Determinism) {
    const std::vector<std::string> args{"scan", "--carlitz", "3", "--beta", "1/t", "--S", "inf", "--max-deg", "2"};
    auto a = call(args);
    auto b = call(args);
    auto c = call({"scan", "--carlitz", "3", "--beta", "1/t", "--S", "inf", "--max-deg", "2", "--threads", "1"});
    ASSERT_EQ(a.code, 0) << a.err;
    EXPECT_EQ(a.out, b.out);
    EXPECT_EQ(a.out, c.out);
    auto j = json::parse(a.out);
    EXPECT_EQ(j["counts"]["ALL"], 1);
    EXPECT_TRUE(j["s_integral_candidates"].empty());
}

TEST_F(CliTest, EmittedStringsRoundTrip) {
    auto r = call({"convergence", "--carlitz", "3", "--beta", "1/t", "--powers", "3"});
    ASSERT_EQ(r.code, 0) << r.err;
    auto j = json::parse(r.out);
    auto F = Field::prime(3);
    for (const auto& row : j["rows"]) {
        const std::string Q = row["Q"];
        EXPECT_EQ(to_string(parse_poly(F, Q)), Q);
        for (const auto& cell : row["cells"]) EXPECT_EQ(to_string(parse_rational(cell.get<std::string>())), cell.get<std::string>());
        EXPECT_EQ(row["row_sum"], "0");
    }
    for (const auto& col : j["columns"]) EXPECT_EQ(to_string(parse_place(F, col.get<std::string>())), col.get<std::string>());

    auto p = call({"packet-profile", "--carlitz", "3", "--Q", "t^2+1", "--beta", "(t+1)/t^2", "--place", "inf"});
    ASSERT_EQ(p.code, 0) << p.err;
    auto pj = json::parse(p.out);
    for (const auto& rr : pj["rational_roots"]) {
        const std::string s = rr["root"];
        EXPECT_EQ(to_string(parse_ratfunc(F, s)), s);
    }
}

TEST_F(CliTest, CsvAndOutFile) {
    const std::string out = path("table.csv");
    auto r = call({"convergence", "--carlitz", "3", "--beta", "1/t", "--powers", "2", "--format", "csv", "--out", out});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_TRUE(r.out.empty());
    std::ifstream in(out);
    std::string header;
    std::getline(in, header);
    EXPECT_EQ(header, "Q,inf,t,t+1,others,row_sum");
    std::string first;
    std::getline(in, first);
    EXPECT_EQ(first, "t,0,1,-1,0,0");
    EXPECT_EQ(call({"torsion", "--carlitz", "3", "--x", "1", "--format", "csv"}).code, 2);
}

TEST_F(CliTest, ConfigFile) {
    const std::string cfg = write("cfg.json", R"({"command": "ball-report", "carlitz": 3, "Q": "t^3"})");
    auto r = call({"--config", cfg});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_EQ(json::parse(r.out)["packet_size"], 27);
    // Command-line flags override the file.
    auto o = call({"ball-report", "--config", cfg, "--Q", "t^2"});
    ASSERT_EQ(o.code, 0) << o.err;
    EXPECT_EQ(json::parse(o.out)["packet_size"], 9);
    const std::string bad = write("bad.json", R"({"command": "ball-report", "carlitz": 3, "Q": "t", "colour": 1})");
    EXPECT_EQ(call({"--config", bad}).code, 2);
}

TEST_F(CliTest, RemainingVerbs) {
    auto f = call({"factor", "--p", "3", "--poly", "t^5+2*t^3+t+1"});
    ASSERT_EQ(f.code, 0) << f.err;
    auto fj = json::parse(f.out);
    EXPECT_EQ(fj["factors"][0]["poly"], "t+1");
    EXPECT_EQ(fj["factors"][0]["exponent"], 2);

    auto l = call({"local-height", "--carlitz", "3", "--x", "1/t", "--place", "t"});
    ASSERT_EQ(l.code, 0) << l.err;
    EXPECT_EQ(json::parse(l.out)["value"], "1");

    auto i = call({"integrality", "--carlitz", "3", "--Q", "t", "--beta", "t^2", "--S", "inf"});
    ASSERT_EQ(i.code, 0) << i.err;
    EXPECT_EQ(json::parse(i.out)["verdict"], "NONE");

    auto c = call({"count", "--p", "2", "--Q", "t^2", "--tail", "1", "--brute", "--monic-only"});
    ASSERT_EQ(c.code, 0) << c.err;
    auto cj = json::parse(c.out);
    EXPECT_EQ(cj["formula"], "2");
    EXPECT_EQ(cj["brute"], "2");

    auto e = call({"example-ih", "--p", "3", "--n", "1"});
    ASSERT_EQ(e.code, 0) << e.err;
    auto ej = json::parse(e.out);
    EXPECT_EQ(ej["rows"][0]["avg_h"], "1/4");
    EXPECT_EQ(ej["rows"][0]["U"], "1/12");
    EXPECT_EQ(call({"example-ih", "--p", "2", "--n", "1"}).code, 2);

    auto b = call({"bosser", "--carlitz", "3", "--beta", "1", "--powers", "4"});
    ASSERT_EQ(b.code, 0) << b.err;
    EXPECT_EQ(json::parse(b.out)["rows"][0]["min_log_distance"], "0");
}

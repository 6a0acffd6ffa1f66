#include <algorithm>
#include <cctype>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "cli.hpp"

using ptau::cli::run_cli;

namespace {

struct Result {
    int code;
    std::string out, err;
};

Result run(std::vector<std::string> args) {
    std::ostringstream out, err;
    const int code = run_cli(args, out, err);
    return {code, out.str(), err.str()};
}

std::vector<std::vector<std::string>> csv_rows(const std::string& text) {
    std::vector<std::vector<std::string>> rows;
    std::istringstream is(text);
    std::string line;
    while (std::getline(is, line)) {
        std::vector<std::string> cells;
        std::string cell;
        std::istringstream ls(line);
        while (std::getline(ls, cell, ',')) cells.push_back(cell);
        if (!line.empty() && line.back() == ',') cells.emplace_back();
        rows.push_back(cells);
    }
    return rows;
}

}  // namespace

TEST(Cli, P3CsvHeaderAndRows) {
    const Result r = run({"p3", "--t", "1", "--mu", "0", "--n-max", "10", "--route", "det", "--format", "csv"});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto rows = csv_rows(r.out);
    ASSERT_EQ(rows.size(), 12u);
    EXPECT_EQ(r.out.substr(0, r.out.find('\n')), "n,r,rbar,v,tau_ratio,tau");
    EXPECT_EQ(rows[1][0], "0");
    EXPECT_EQ(rows[11][0], "10");
    // mu = 0: r_n = rbar_n
    for (std::size_t i = 1; i < rows.size(); ++i) EXPECT_EQ(rows[i][1], rows[i][2]);
    const std::string mant = rows[2][1].substr(0, rows[2][1].find('e'));
    EXPECT_EQ(std::count_if(mant.begin(), mant.end(), ::isdigit), 30);
}

TEST(Cli, P5AtZeroTimeGivesClosedForm) {
    const Result r = run({"p5", "--t", "0", "--mu", "0.3", "--nu", "0.7", "--n-max", "5", "--route", "recur11"});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto rows = csv_rows(r.out);
    ptau::PrecisionScope s(296);
    const ptau::Real mu = ptau::Real::parse("0.3"), nu = ptau::Real::parse("0.7");
    for (long n = 0; n <= 5; ++n) {
        EXPECT_EQ(rows[static_cast<std::size_t>(n) + 1][1], ptau::closed_form_t0_v(mu, nu, n).r.to_string(30)) << n;
    }
}

TEST(Cli, RouteAllHasDeviationColumns) {
    const Result r = run({"p3", "--t", "1", "--mu", "0.3", "--route", "all", "--n-max", "4"});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_EQ(r.out.substr(0, r.out.find('\n')), "route,n,r,rbar,v,tau_ratio,tau,status,dev_r,dev_rbar");
    EXPECT_NE(r.out.find("\nham,3,"), std::string::npos);
    EXPECT_NE(r.out.find("\nhyp,4,"), std::string::npos);
    EXPECT_NE(r.out.find("\nr21,0,,,,,,not-applicable"), std::string::npos);
}

TEST(Cli, CsvAndJsonCarryIdenticalStrings) {
    const std::vector<std::string> base = {"p5", "--t", "1", "--mu", "0.3", "--nu", "0.7", "--n-max", "6", "--digits", "25"};
    auto csv = base, json = base;
    json.insert(json.end(), {"--format", "json"});
    const Result a = run(csv), b = run(json);
    ASSERT_EQ(a.code, 0);
    ASSERT_EQ(b.code, 0);
    const auto rows = csv_rows(a.out);
    const auto j = nlohmann::json::parse(b.out);
    ASSERT_EQ(j["rows"].size() + 1, rows.size());
    const char* keys[] = {"n", "r", "rbar", "v", "tau_ratio", "tau"};
    for (std::size_t i = 0; i < j["rows"].size(); ++i) {
        EXPECT_EQ(std::to_string(j["rows"][i]["n"].get<long>()), rows[i + 1][0]);
        for (int k = 1; k < 6; ++k) EXPECT_EQ(j["rows"][i][keys[k]].get<std::string>(), rows[i + 1][k]);
    }
}

TEST(Cli, OutputIsDeterministic) {
    const std::vector<std::string> args = {"p3", "--t", "2", "--mu", "-0.4", "--route", "hyp", "--n-max", "5"};
    EXPECT_EQ(run(args).out, run(args).out);
}

TEST(Cli, WritesToFile) {
    const std::string path = ::testing::TempDir() + "ptau_cli_out.csv";
    const Result r = run({"p3", "--t", "1", "--n-max", "3", "--out", path});
    ASSERT_EQ(r.code, 0);
    EXPECT_TRUE(r.out.empty());
    std::ifstream f(path);
    std::stringstream ss;
    ss << f.rdbuf();
    EXPECT_EQ(ss.str(), run({"p3", "--t", "1", "--n-max", "3"}).out);
    std::remove(path.c_str());
}

TEST(Cli, ValidatePasses) {
    const Result r = run({"validate", "--system", "p3", "--t", "1", "--mu", "0.3"});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto j = nlohmann::json::parse(r.out);
    EXPECT_TRUE(j["pass"].get<bool>());
    ASSERT_TRUE(j.contains("params"));
    ASSERT_TRUE(j.contains("precision"));
    for (const auto& route : j["routes"]) {
        EXPECT_TRUE(route.contains("id"));
        EXPECT_TRUE(route.contains("status"));
        EXPECT_TRUE(route.contains("max_dev"));
    }
    std::vector<std::string> names;
    for (const auto& id : j["identities"]) {
        names.push_back(id["name"]);
        EXPECT_LT(std::stod(id["max_residual"].get<std::string>()), 1e-30);
    }
    EXPECT_NE(std::find(names.begin(), names.end(), "first_integral"), names.end());
    EXPECT_NE(std::find(names.begin(), names.end(), "tau_ratio"), names.end());
}

TEST(Cli, ValidatePvListsAllIdentities) {
    const Result r = run({"validate", "--system", "p5", "--t", "0.5", "--mu", "1.2", "--nu", "0.4", "--n-max", "6"});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto j = nlohmann::json::parse(r.out);
    std::vector<std::string> names;
    for (const auto& id : j["identities"]) names.push_back(id["name"]);
    for (const char* want : {"tau_ratio", "l_relation", "avm_eq1", "avm_eq2", "unity", "vh_a", "transform_x", "transform_y"}) {
        EXPECT_NE(std::find(names.begin(), names.end(), want), names.end()) << want;
    }
}

TEST(Cli, LimitRatiosNearHalf) {
    const Result r = run({"limit", "--t", "1", "--mu", "0.3", "--n", "4", "--nu-list", "16,32,64,128"});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto j = nlohmann::json::parse(r.out);
    ASSERT_EQ(j["rows"].size(), 4u);
    EXPECT_TRUE(j["rows"][0]["ratio"].is_null());
    for (std::size_t i = 1; i < 4; ++i) EXPECT_NEAR(j["rows"][i]["ratio"].get<double>(), 0.5, 0.1);
}

TEST(Cli, StabilityReport) {
    const Result r = run({"stability", "--system", "p3", "--t", "1", "--n-max", "8"});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto j = nlohmann::json::parse(r.out);
    EXPECT_TRUE(j["slopes"].contains("dp2"));
    EXPECT_GE(j["suggested_per_step_bits"].get<long>(), 1);
}

TEST(Cli, MalformedFlagExitsTwoWithUsage) {
    const Result r = run({"p3", "--t", "1", "--bogus"});
    EXPECT_EQ(r.code, 2);
    EXPECT_NE(r.err.find("Usage"), std::string::npos);
    EXPECT_EQ(run({"p3", "--t", "abc"}).code, 2);
    EXPECT_EQ(run({"p3", "--t", "-1"}).code, 2);
    EXPECT_EQ(run({"p3", "--t", "1", "--route", "r21"}).code, 2);
    EXPECT_EQ(run({}).code, 2);
}

TEST(Cli, DigitsBeyondPrecisionRejected) {
    const Result r = run({"p3", "--t", "1", "--n-max", "2", "--digits", "200"});
    EXPECT_EQ(r.code, 2);
    EXPECT_NE(r.err.find("--digits"), std::string::npos);
    EXPECT_EQ(run({"p3", "--t", "1", "--digits", "0"}).code, 2);
}

TEST(Cli, SingularRouteExitsThree) {
    const Result r = run({"p5", "--t", "0", "--mu", "0.3", "--nu", "0.7", "--n-max", "3", "--route", "ham"});
    EXPECT_EQ(r.code, 3);
    EXPECT_FALSE(r.err.empty());
}

TEST(Cli, ExhaustedEscalationExitsFour) {
    const Result r = run({"p3", "--t", "1", "--mu", "0.3", "--n-max", "3", "--route", "all", "--tol", "1e-300",
                          "--max-escalations", "0"});
    EXPECT_EQ(r.code, 4);
}

TEST(Cli, HelpExitsZero) {
    const Result r = run({"--help"});
    EXPECT_EQ(r.code, 0);
    EXPECT_NE(r.out.find("validate"), std::string::npos);
}

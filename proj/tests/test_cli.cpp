#include <doctest.h>

#include "stripemb/cli.hpp"
#include "stripemb/errors.hpp"

#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

using stripemb::cli::run_cli;
using nlohmann::json;

namespace {

struct Run {
    int code;
    std::string out;
    std::string err;
};

Run invoke(std::vector<std::string> args) {
    args.insert(args.begin(), "stripemb");
    std::vector<const char*> argv;
    for (const auto& a : args) {
        argv.push_back(a.c_str());
    }
    std::ostringstream out, err;
    const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

void check_schema(const json& j) {
    REQUIRE(j.is_object());
    CHECK(j.size() == 4);
    for (const char* key : {"input", "result", "error_estimates", "meta"}) {
        CHECK(j.contains(key));
        CHECK(j[key].is_object());
    }
    CHECK(j["meta"]["program"] == "stripemb");
    CHECK(j["meta"]["version"] == stripemb::cli::kVersion);
    CHECK(j["input"].contains("command"));
    std::vector<const json*> stack{&j};
    while (!stack.empty()) {
        const json* cur = stack.back();
        stack.pop_back();
        if (cur->is_structured()) {
            for (const auto& v : *cur) {
                stack.push_back(&v);
            }
        } else if (cur->is_number()) {
            CHECK(std::isfinite(cur->get<double>()));
        } else {
            CHECK_FALSE(cur->is_null());
        }
    }
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream f(p);
    std::stringstream s;
    s << f.rdbuf();
    return s.str();
}

}  // namespace

TEST_CASE("interval parsing") {
    const stripemb::Interval iv = stripemb::cli::parse_interval("-1.5:3.141592653589793");
    CHECK(iv.lo == -1.5);
    CHECK(iv.hi == 3.141592653589793);
    for (const char* bad : {"1", "1:1", "2:1", "a:b", "0:1x", "0:inf", ":1"}) {
        CAPTURE(bad);
        CHECK_THROWS_AS(stripemb::cli::parse_interval(bad), stripemb::DomainError);
    }
}

TEST_CASE("pi command") {
    const Run r = invoke({"pi", "--p", "2"});
    REQUIRE(r.code == 0);
    const json j = json::parse(r.out);
    check_schema(j);
    CHECK(j["result"]["pi_p"].get<double>() == 3.141592653589793);
    CHECK(j["error_estimates"]["quadrature_closed_diff"].get<double>() <= 1e-12);
}

TEST_CASE("norm command reproduces the headline constant") {
    const Run r = invoke({"norm", "--p", "2", "--free", "1", "--interval", "0:3.141592653589793"});
    REQUIRE(r.code == 0);
    const json j = json::parse(r.out);
    check_schema(j);
    CHECK(j["result"]["norm"].get<double>() == doctest::Approx(0.70710678).epsilon(1e-8));
    CHECK(j["input"]["domain"]["free"] == 1);
}

TEST_CASE("identical runs give identical bytes") {
    const std::vector<std::string> args{"certify", "--p",      "2",    "--free", "1",   "--interval", "0:3.14159",
                                        "--l",     "12.566",  "--m",  "2",      "--trials", "10"};
    const Run a = invoke(args);
    const Run b = invoke(args);
    REQUIRE(a.code == 0);
    CHECK(a.out == b.out);
    check_schema(json::parse(a.out));
    const Run c = invoke({"refute", "--p", "2", "--free", "1", "--interval", "0:3.14159", "--l", "12.566",
                          "--centers", "4", "--extent", "40"});
    const Run d = invoke({"refute", "--p", "2", "--free", "1", "--interval", "0:3.14159", "--l", "12.566",
                          "--centers", "4", "--extent", "40"});
    REQUIRE(c.code == 0);
    CHECK(c.out == d.out);
    const json j = json::parse(c.out);
    check_schema(j);
    CHECK(j["result"]["refutes"] == true);
    CHECK(j["input"]["seed"] == 42);
}

TEST_CASE("rayleigh and verify-ul commands") {
    const Run r = invoke({"rayleigh", "--p", "3", "--free", "1", "--interval", "0:1", "--l", "2"});
    REQUIRE(r.code == 0);
    const json j = json::parse(r.out);
    check_schema(j);
    CHECK(j["result"]["gap"].get<double>() == doctest::Approx(j["result"]["closed_gap"].get<double>()).epsilon(1e-6));
    const Run rect = invoke({"rayleigh", "--p", "3", "--interval", "0:1", "--interval", "0:2"});
    REQUIRE(rect.code == 0);
    const json jr = json::parse(rect.out);
    CHECK(jr["result"]["quotient"].get<double>() == doctest::Approx(jr["result"]["lambda"].get<double>()).epsilon(1e-8));

    const Run v = invoke({"verify-ul", "--p", "1.5", "--free", "1", "--interval", "0:3.141592653589793", "--l", "3.141592653589793"});
    REQUIRE(v.code == 0);
    const json jv = json::parse(v.out);
    check_schema(jv);
    CHECK(jv["result"]["passed"] == true);
}

TEST_CASE("eigen command example") {
    const auto dir = std::filesystem::temp_directory_path() / "stripemb_cli_test";
    std::filesystem::create_directories(dir);
    const Run r = invoke({"eigen", "--p", "2", "--rect", "0:1", "--grid", "255", "--tol", "1e-10", "--csv",
                          (dir / "trace.csv").string(), "--svg", (dir / "trace.svg").string()});
    REQUIRE(r.code == 0);
    const json j = json::parse(r.out);
    check_schema(j);
    CHECK(std::abs(j["result"]["lambda_h"].get<double>() - 9.8696) <= 2e-4);
    const std::string csv = slurp(dir / "trace.csv");
    CHECK(csv.rfind("iteration,quotient\n", 0) == 0);
    CHECK(slurp(dir / "trace.svg").find("<polyline") != std::string::npos);
}

TEST_CASE("sinp-table writes JSON, CSV and SVG") {
    const auto dir = std::filesystem::temp_directory_path() / "stripemb_cli_test";
    std::filesystem::create_directories(dir);
    const auto out = dir / "table.json";
    const Run r = invoke({"sinp-table", "--p", "3", "--points", "11", "--output", out.string(), "--csv",
                          (dir / "table.csv").string(), "--svg", (dir / "table.svg").string()});
    REQUIRE(r.code == 0);
    CHECK(r.out.empty());
    const json j = json::parse(slurp(out));
    check_schema(j);
    CHECK(j["result"]["x"].size() == 11);
    CHECK(j["error_estimates"]["max_identity_residual"].get<double>() <= 1e-12);

    std::istringstream csv(slurp(dir / "table.csv"));
    std::string line;
    std::getline(csv, line);
    CHECK(line == "x,sin_p,cos_p");
    int rows = 0;
    while (std::getline(csv, line)) {
        CHECK(line.find(',') != std::string::npos);
        ++rows;
    }
    CHECK(rows == 11);
    CHECK(slurp(dir / "table.svg").find("<svg") == 0);
}

TEST_CASE("exit codes") {
    SUBCASE("validation") {
        CHECK(invoke({"pi"}).code == 1);
        CHECK(invoke({"pi", "--p", "1"}).code == 1);
        CHECK(invoke({"pi", "--p", "abc"}).code == 1);
        CHECK(invoke({"frobnicate"}).code == 1);
        CHECK(invoke({"norm", "--p", "2", "--interval", "3:1"}).code == 1);
        CHECK(invoke({"norm", "--p", "2", "--free", "1"}).code == 1);
        CHECK(invoke({"rayleigh", "--p", "2", "--free", "1", "--interval", "0:1"}).code == 1);
        CHECK(invoke({"norm", "--p", "2", "--interval", "0:1", "--svg", "x.svg"}).code == 1);
        const Run r = invoke({"eigen", "--p", "2", "--rect", "0:1", "--grid", "3"});
        CHECK(r.code == 1);
        CHECK_FALSE(r.err.empty());
    }
    SUBCASE("convergence") {
        const Run r = invoke({"eigen", "--p", "3", "--rect", "0:1", "--grid", "63", "--max-iter", "1"});
        CHECK(r.code == 2);
        CHECK(r.out.empty());
    }
    SUBCASE("certification") {
        CHECK(invoke({"refute", "--p", "2", "--free", "1", "--interval", "0:3.141592653589793", "--l",
                      "3.141592653589793"})
                  .code == 3);
        CHECK(invoke({"certify", "--p", "2", "--free", "1", "--interval", "0:3.141592653589793", "--l", "12",
                      "--m", "2", "--trials", "10", "--tol", "1e-300"})
                  .code == 3);
    }
    SUBCASE("help") {
        CHECK(invoke({"--help"}).code == 0);
    }
}

TEST_CASE("installed binary reports exit codes") {
    const std::string tool = STRIPEMB_TOOL_PATH;
    const auto dir = std::filesystem::temp_directory_path() / "stripemb_cli_test";
    std::filesystem::create_directories(dir);
    const std::string sink = " > " + (dir / "stdout.txt").string() + " 2> " + (dir / "stderr.txt").string();
    int status = std::system((tool + " pi --p 2" + sink).c_str());
    CHECK(WEXITSTATUS(status) == 0);
    CHECK(json::parse(slurp(dir / "stdout.txt"))["result"]["pi_p"].get<double>() == 3.141592653589793);
    status = std::system((tool + " pi --p 0.5" + sink).c_str());
    CHECK(WEXITSTATUS(status) == 1);
    CHECK_FALSE(slurp(dir / "stderr.txt").empty());
}

// End-to-end CLI checks: exit codes, CSV headers, schema-valid JSON output.
// The binary path and repo root come from the environment (set by CTest).

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <array>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "schema_check.hpp"

using json = nlohmann::json;

namespace {

std::string cli_path() {
    const char* p = std::getenv("SINEKREIN_CLI");
    REQUIRE(p != nullptr);
    return p;
}

std::string repo_root() {
    const char* p = std::getenv("SINEKREIN_ROOT");
    REQUIRE(p != nullptr);
    return p;
}

struct RunResult {
    int exit_code;
    std::string out;
};

RunResult run_cli(const std::string& args) {
    const std::string out_path =
        std::string("/tmp/sinekrein_cli_") + std::to_string(::getpid()) + ".out";
    const std::string cmd = cli_path() + " " + args + " > " + out_path + " 2>/dev/null";
    const int status = std::system(cmd.c_str());
    std::ifstream in(out_path);
    std::stringstream ss;
    ss << in.rdbuf();
    std::remove(out_path.c_str());
    return {WEXITSTATUS(status), ss.str()};
}

json load_schema(const std::string& name) {
    std::ifstream in(repo_root() + "/schemas/" + name);
    REQUIRE(in.good());
    return json::parse(in);
}

void check_schema(const json& doc, const std::string& schema_name) {
    std::string error;
    const bool ok = schema_check::validate(doc, load_schema(schema_name), error);
    INFO(error);
    CHECK(ok);
}

std::string first_line(const std::string& s) { return s.substr(0, s.find('\n')); }

}  // namespace

TEST_CASE("usage errors exit with code 2") {
    CHECK(run_cli("resolvent --mu 1.5").exit_code == 2);
    CHECK(run_cli("resolvent --mu 0").exit_code == 2);
    CHECK(run_cli("").exit_code == 2);
    CHECK(run_cli("no-such-subcommand").exit_code == 2);
    CHECK(run_cli("asymptotics --dt 0.03").exit_code == 2);
    CHECK(run_cli("obstruction --output csv").exit_code == 2);
}

TEST_CASE("quad emits the documented CSV") {
    const auto res = run_cli("quad --xi 1 --panels-per-unit 1 --order 2 --output csv");
    REQUIRE(res.exit_code == 0);
    CHECK(first_line(res.out) == "index,node,weight,panel");
    // 17-significant-digit round trip of the first node
    CHECK(res.out.find("0.21132486540518713") != std::string::npos);
}

TEST_CASE("quad json validates against the bundled schema") {
    const auto res = run_cli("quad --xi 2 --panels-per-unit 2 --order 4 --output json");
    REQUIRE(res.exit_code == 0);
    check_schema(json::parse(res.out), "quad_report.schema.json");
}

TEST_CASE("resolvent csv and json") {
    const auto csv =
        run_cli("resolvent --mu 0.5 --xi 5 --probe 1.0,0.5 --output csv --log-level silent");
    REQUIRE(csv.exit_code == 0);
    CHECK(first_line(csv.out) == "xi,x,t,value");
    const auto js = run_cli("resolvent --mu 0.5 --xi 5 --output json --log-level silent");
    REQUIRE(js.exit_code == 0);
    check_schema(json::parse(js.out), "resolvent_report.schema.json");
}

TEST_CASE("factor csv header and json schema") {
    const auto csv = run_cli("factor --mu 0.5 --xi 4 --output csv");
    REQUIRE(csv.exit_code == 0);
    CHECK(first_line(csv.out) == "key,x,value");
    const auto js = run_cli("factor --mu 0.5 --xi 4 --output json");
    REQUIRE(js.exit_code == 0);
    const json doc = json::parse(js.out);
    check_schema(doc, "factor_report.schema.json");
    CHECK(doc["triangular"]["lower"].get<bool>());
}

TEST_CASE("asymptotics csv and json") {
    const auto csv =
        run_cli("asymptotics --mu 0.5 --t-min 2 --t-max 4 --dt 0.05 --output csv");
    REQUIRE(csv.exit_code == 0);
    CHECK(first_line(csv.out) == "t,diag,corner,ode_residual,envelope,sigma");
    const auto js =
        run_cli("asymptotics --mu 0.5 --t-min 2 --t-max 4 --dt 0.05 --output json");
    REQUIRE(js.exit_code == 0);
    check_schema(json::parse(js.out), "asymptotics_report.schema.json");
}

TEST_CASE("krein-ode emits trajectory and comparison block") {
    const auto js = run_cli("krein-ode --mu 0.5 --z 0+2i --x-max 10 --output json");
    REQUIRE(js.exit_code == 0);
    const json doc = json::parse(js.out);
    check_schema(doc, "krein_ode_report.schema.json");
    CHECK(doc["comparison"].contains("pi_closed"));
    const auto csv = run_cli("krein-ode --mu 0.5 --z 1 --x-max 5 --output csv");
    REQUIRE(csv.exit_code == 0);
    CHECK(first_line(csv.out) == "x,p_re,p_im,pstar_re,pstar_im");
}

TEST_CASE("obstruction json validates") {
    const auto js =
        run_cli("obstruction --mu 0.5 --t-list 3,5 --z-probes 0+2i --output json");
    REQUIRE(js.exit_code == 0);
    const json doc = json::parse(js.out);
    check_schema(doc, "obstruction_report.schema.json");
    CHECK(doc["g_at_zero"].get<double>() == doctest::Approx(2.0));
}

TEST_CASE("volterra-demo json validates") {
    const auto js = run_cli("volterra-demo --mu 0.5 --xi 4 --output json");
    REQUIRE(js.exit_code == 0);
    check_schema(json::parse(js.out), "volterra_report.schema.json");
}

TEST_CASE("config file feeds defaults and flags override") {
    const std::string cfg_path = "/tmp/sinekrein_test_cfg.toml";
    {
        std::ofstream cfg(cfg_path);
        cfg << "mu = 0.25\n[grid]\npanels_per_unit = 2\n";
    }
    const auto js = run_cli("--config " + cfg_path + " resolvent --xi 3 --output json");
    REQUIRE(js.exit_code == 0);
    CHECK(json::parse(js.out)["mu"].get<double>() == doctest::Approx(0.25));
    const auto js2 =
        run_cli("--config " + cfg_path + " resolvent --mu 0.5 --xi 3 --output json");
    REQUIRE(js2.exit_code == 0);
    CHECK(json::parse(js2.out)["mu"].get<double>() == doctest::Approx(0.5));
    std::remove(cfg_path.c_str());
}

TEST_CASE("out-file writes the data file") {
    const std::string path = "/tmp/sinekrein_quad_out.csv";
    const auto res =
        run_cli("quad --xi 1 --panels-per-unit 1 --order 2 --output csv --out-file " + path);
    REQUIRE(res.exit_code == 0);
    std::ifstream in(path);
    std::string header;
    std::getline(in, header);
    CHECK(header == "index,node,weight,panel");
    std::remove(path.c_str());
}

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <array>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <nlohmann/json.hpp>
#include <sstream>
#include <string>

using nlohmann::json;

namespace {

struct RunResult {
    int exit_code = -1;
    std::string out;
};

RunResult run_cli(const std::string& args) {
    std::string cmd = std::string(SPINCHAIN_CLI_PATH) + " " + args + " 2>/dev/null";
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    RunResult r;
    std::array<char, 4096> buf{};
    size_t n;
    while ((n = fread(buf.data(), 1, buf.size(), pipe)) > 0) r.out.append(buf.data(), n);
    int status = pclose(pipe);
    r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return r;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

TEST_CASE("solve --method classical on the Ising preset") {
    RunResult r = run_cli("solve --method classical --preset ising_zz --n 3");
    REQUIRE(r.exit_code == 0);
    json doc = json::parse(r.out);
    CHECK(doc["result"]["energy"].get<double>() == doctest::Approx(-2.0));
    CHECK(doc.contains("schema"));
    CHECK(doc.contains("input_digest"));
    CHECK(doc["parameters"].is_object());
}

TEST_CASE("solve --method exact honours the size ceiling") {
    RunResult ok = run_cli("solve --method exact --preset tfim:g=1 --n 12");
    CHECK(ok.exit_code == 0);  // 2^12 == 4096 is the last admissible size
    RunResult over = run_cli("solve --method exact --preset tfim:g=1 --n 13");
    CHECK(over.exit_code == 3);
}

TEST_CASE("solve --method mps stays within the reported budget of als") {
    RunResult mps = run_cli(
        "solve --method mps --preset tfim:g=1 --n 4 --bond-dim 2 --eps-rho 0.5 --eps-a 1.5");
    REQUIRE(mps.exit_code == 0);
    json mdoc = json::parse(mps.out);
    double e_mps = mdoc["result"]["energy"].get<double>();
    double budget = mdoc["result"]["bound_report"]["delta_rho"].get<double>() +
                    mdoc["result"]["bound_report"]["delta_a"].get<double>();

    RunResult als = run_cli("solve --method als --preset tfim:g=1 --n 4 --bond-dim 2");
    REQUIRE(als.exit_code == 0);
    double e_als = json::parse(als.out)["result"]["energy"].get<double>();
    CHECK(e_mps <= e_als + budget);
    CHECK(e_mps >= e_als - 1e-6);  // als is itself variational here
}

TEST_CASE("validation failures exit 2") {
    CHECK(run_cli("solve --method warp --preset ising_zz --n 3").exit_code == 2);
    CHECK(run_cli("solve --method exact --preset nosuch --n 3").exit_code == 2);
    CHECK(run_cli("solve --method exact").exit_code == 2);  // no input or preset
}

TEST_CASE("identical invocations produce byte-identical documents") {
    std::string f = "/tmp/spinchain_cli_run.json";
    std::string cmd = "solve --method meanfield --preset tfim:g=1 --n 3 --delta 1.0 --output " + f;
    REQUIRE(run_cli(cmd).exit_code == 0);
    std::string a = read_file(f);
    REQUIRE(run_cli(cmd).exit_code == 0);
    std::string b = read_file(f);
    CHECK(!a.empty());
    CHECK(a == b);
}

TEST_CASE("csv output is a flat projection") {
    RunResult r = run_cli("solve --method classical --preset ising_zz --n 3 --format csv");
    REQUIRE(r.exit_code == 0);
    CHECK(r.out.find("result.energy") != std::string::npos);
    CHECK(r.out.find("-2") != std::string::npos);
}

TEST_CASE("cost reports the formulas as decimals and logs") {
    RunResult r = run_cli("cost --n 10 --d 2 --bond-dim 1 --delta 1");
    REQUIRE(r.exit_code == 0);
    json doc = json::parse(r.out);
    CHECK(doc["result"]["mean_field_count"].get<std::string>().substr(0, 3) == "1.6");
    CHECK(doc["result"]["mean_field_log10"].get<double>() ==
          doctest::Approx(18.2041199826559).epsilon(1e-9));
    CHECK(run_cli("cost --n 10 --d 2").exit_code == 2);  // missing required flags
}

TEST_CASE("verify rho-drift and overlap pass") {
    RunResult drift = run_cli("verify --check rho-drift --n 5 --bond-dim 2 --trials 20");
    CHECK(drift.exit_code == 0);
    json ddoc = json::parse(drift.out);
    CHECK(ddoc["result"]["pass"].get<bool>());

    RunResult overlap = run_cli("verify --check overlap --n 6 --bond-dim 2 --trials 20");
    CHECK(overlap.exit_code == 0);
    json odoc = json::parse(overlap.out);
    CHECK(odoc["result"]["pass"].get<bool>());
    CHECK(odoc["result"]["trials_run"].get<int>() > 0);
}

TEST_CASE("verify nets certifies at the requested radius") {
    RunResult r = run_cli("verify --check nets --epsilon 0.5 --bond-dim 2 --eps-a 1.5");
    CHECK(r.exit_code == 0);
    json doc = json::parse(r.out);
    CHECK(doc["result"]["pass"].get<bool>());
}

TEST_CASE("timing is opt-in so documents stay deterministic") {
    RunResult plain = run_cli("solve --method classical --preset ising_zz --n 3");
    CHECK(plain.out.find("wall_time_ms") == std::string::npos);
    RunResult timed = run_cli("solve --method classical --preset ising_zz --n 3 --timing");
    CHECK(timed.out.find("wall_time_ms") != std::string::npos);
}

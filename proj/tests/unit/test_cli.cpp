#include <doctest.h>

#include <array>
#include <cstdio>
#include <fstream>
#include <string>

#ifndef FLOWLAB_CLI_PATH
#define FLOWLAB_CLI_PATH "flowlab"
#endif

namespace {

struct RunResult {
    int exit_code = -1;
    std::string output;
};

RunResult run_cli(const std::string& args) {
    const std::string cmd = std::string(FLOWLAB_CLI_PATH) + " " + args + " 2>/dev/null";
    RunResult result;
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    std::array<char, 4096> buf{};
    std::size_t got = 0;
    while ((got = fread(buf.data(), 1, buf.size(), pipe)) > 0) result.output.append(buf.data(), got);
    const int status = pclose(pipe);
    result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return result;
}

std::string write_config(const std::string& name, const std::string& body) {
    const std::string path = "cli_test_" + name + ".json";
    std::ofstream out(path);
    out << body;
    return path;
}

}  // namespace

TEST_CASE("bracket subcommand prints canonical fields") {
    auto r = run_cli("bracket \"v:x1^2*x2^2\" \"v:x1\"");
    CHECK(r.exit_code == 0);
    CHECK(r.output == "[2*x1^2, -4*x1*x2]\n");

    r = run_cli("bracket \"(0,1)\" \"(0,1)\"");
    CHECK(r.exit_code == 0);
    CHECK(r.output == "[0, 0]\n");

    r = run_cli("bracket \"(x1^2)\" \"(x1^3)\"");
    CHECK(r.exit_code == 0);
    CHECK(r.output == "[x1^4]\n");

    r = run_cli("bracket \"(x1\" \"(x2)\"");
    CHECK(r.exit_code == 2);
}

TEST_CASE("identical seeded runs emit identical bytes") {
    const auto cfg = write_config(
        "rank", R"({"family":{"kind":"resnet","dimension":2,"activation":"tanh",
        "weight_structure":"full"},"ensemble":{"seed":3,"count":3},"method":"span",
        "num_samples":64})");
    const auto a = run_cli("--no-timestamp rank --config " + cfg);
    const auto b = run_cli("--no-timestamp rank --config " + cfg);
    CHECK(a.exit_code == 0);
    CHECK(a.output == b.output);
    CHECK(a.output.find("\"achieved_rank\"") != std::string::npos);
    std::remove(cfg.c_str());
}

TEST_CASE("exit code contract") {
    // Validation failures exit 2.
    const auto bad_n = write_config(
        "badn", R"({"family":{"kind":"affine","preset":"volume-preserving"},
        "ensemble":{"count":0,"seed":1},"method":"span"})");
    CHECK(run_cli("rank --config " + bad_n).exit_code == 2);
    std::remove(bad_n.c_str());

    const auto unknown = write_config(
        "unknown", R"({"family":{"kind":"affine","preset":"volume-preserving"},
        "ensemble":{"count":2,"seed":1},"method":"span","bogus_field":1})");
    CHECK(run_cli("rank --config " + unknown).exit_code == 2);
    std::remove(unknown.c_str());

    // Numerical failure (blow-up) exits 3, still emitting the report.
    const auto blow = write_config(
        "blow", R"({"family":{"kind":"affine","preset":"cubic-1d"},
        "schedule":{"segments":[{"duration":2.0,"params":[0.0,1.0]}]},
        "x0":[1.0],"step_size":0.001})");
    const auto r = run_cli("--no-timestamp flow --config " + blow);
    CHECK(r.exit_code == 3);
    CHECK(r.output.find("\"blew_up\": true") != std::string::npos);
    std::remove(blow.c_str());
}

TEST_CASE("closure subcommand reports the expected basis") {
    const auto cfg = write_config("closure", R"({"preset":"cubic-1d","degree_cap":7})");
    const auto r = run_cli("--no-timestamp closure --config " + cfg);
    CHECK(r.exit_code == 0);
    CHECK(r.output.find("[x1^2]") != std::string::npos);
    CHECK(r.output.find("[x1^7]") != std::string::npos);
    CHECK(r.output.find("\"basis_size\": 6") != std::string::npos);
    std::remove(cfg.c_str());
}

TEST_CASE("lp subcommand reproduces the disc integral") {
    const auto cfg = write_config(
        "lp", R"({"family":{"kind":"affine","preset":"volume-preserving"},
        "schedule":{"segments":[{"duration":1.0,"params":[0,0,0]}]},
        "target":{"kind":"constant","value":[0,0]},
        "domain":{"kind":"disc"},"p":2.0})");
    const auto r = run_cli("--no-timestamp lp --config " + cfg);
    CHECK(r.exit_code == 0);
    const auto pos = r.output.find("\"error\": 1.2532");
    CHECK(pos != std::string::npos);
    std::remove(cfg.c_str());
}

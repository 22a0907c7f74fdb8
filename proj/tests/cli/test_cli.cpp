// End-to-end checks of the cqed-sim binary: exit codes, artifact layout,
// determinism, and the documented spot values.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string bin() {
    const char* b = std::getenv("CQED_SIM_BIN");
    REQUIRE(b != nullptr);
    return b;
}

std::string config_dir() {
    const char* d = std::getenv("CQED_CONFIG_DIR");
    REQUIRE(d != nullptr);
    return d;
}

int run(const std::string& args) {
    const std::string cmd = bin() + " " + args + " > /dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WEXITSTATUS(status);
}

json read_json(const fs::path& p) {
    std::ifstream is(p);
    REQUIRE(is.good());
    json j;
    is >> j;
    return j;
}

std::string read_file(const fs::path& p) {
    std::ifstream is(p);
    std::ostringstream os;
    os << is.rdbuf();
    return os.str();
}

const fs::path kWork = "/tmp/cqed_cli_test";

void write_json(const fs::path& p, const json& j) {
    fs::create_directories(p.parent_path());
    std::ofstream os(p);
    os << j.dump(2);
}

} // namespace

TEST_CASE("derive reproduces the published parameter table") {
    fs::create_directories(kWork);
    json cfg = {{"job", "derive"},
                {"circuit", config_dir() + "/dtc_three_qubit.json"},
                {"output_dir", (kWork / "derive").string()}};
    write_json(kWork / "derive.json", cfg);
    CHECK(run("derive --config " + (kWork / "derive.json").string()) == 0);

    json result = read_json(kWork / "derive" / "result.json");
    CHECK(result.at("I_c_nA").at(0).get<double>() == doctest::Approx(31.0).epsilon(0.01));
    CHECK(result.at("omega_J_GHz").at(1).get<double>() == doctest::Approx(19.9).epsilon(0.01));
    CHECK(result.at("g_MHz").at(0).at(3).get<double>() == doctest::Approx(283.0).epsilon(0.01));
    CHECK(result.at("loops").at(0).at("omega_J_GHz").get<double>() ==
          doctest::Approx(9.69).epsilon(0.01));

    json manifest = read_json(kWork / "derive" / "manifest.json");
    CHECK(manifest.contains("config_hash"));
    CHECK(manifest.at("cutoffs").at("N") == 10);
    CHECK(fs::exists(kWork / "derive" / "derived_table.txt"));
}

TEST_CASE("zz-scan finds the idle region and writes deterministic CSV") {
    json cfg = {{"job", "zz-scan"},
                {"circuit", config_dir() + "/dtc_two_qubit_L.json"},
                {"cutoffs", {{"N", 4}, {"qubit_group", 30}, {"coupler_group", 12}, {"N0", 100}}},
                {"flux",
                 {{"line", "L"},
                  {"start_over_pi", 0.3},
                  {"stop_over_pi", 0.9},
                  {"step_over_pi", 0.05}}},
                {"threads", 2},
                {"output_dir", (kWork / "scan").string()}};
    write_json(kWork / "scan.json", cfg);
    CHECK(run("zz-scan --config " + (kWork / "scan.json").string()) == 0);

    const std::string csv1 = read_file(kWork / "scan" / "zz_scan.csv");
    CHECK(csv1.find("theta_over_pi") != std::string::npos);
    CHECK(csv1.find("zeta_kHz") != std::string::npos);

    // |zeta| minimum near the published idle point.
    std::istringstream lines(csv1);
    std::string line;
    std::getline(lines, line);  // header
    double best_theta = -1.0, best_abs = 1e300;
    while (std::getline(lines, line)) {
        const auto first_comma = line.find(',');
        const auto last_comma = line.rfind(',');
        const double theta = std::stod(line.substr(0, first_comma));
        const double zeta = std::stod(line.substr(last_comma + 1));
        if (std::abs(zeta) < best_abs) {
            best_abs = std::abs(zeta);
            best_theta = theta;
        }
    }
    CHECK(best_theta > 0.55);
    CHECK(best_theta < 0.75);

    // Re-running the identical job yields byte-identical outputs.
    CHECK(run("zz-scan --config " + (kWork / "scan.json").string()) == 0);
    CHECK(read_file(kWork / "scan" / "zz_scan.csv") == csv1);
}

TEST_CASE("a zero-amplitude CZ pulse scores the identity fidelity") {
    json cfg = {{"job", "gate-cz"},
                {"circuit", config_dir() + "/dtc_two_qubit_L.json"},
                {"cutoffs", {{"N", 3}, {"qubit_group", 24}, {"coupler_group", 10}, {"N0", 120}}},
                {"flux", {{"line", "L"}, {"held_over_pi", {{"L", 0.65}}}}},
                {"frames",
                 {{"start_over_pi", 0.5}, {"stop_over_pi", 0.8}, {"step_over_pi", 0.05}}},
                {"gate",
                 {{"kind", "cz"},
                  {"qubits", {1, 2}},
                  {"duration_ns", 30.0},
                  {"lambda1", 1.0},
                  {"lambda2", 0.0},
                  {"peak_over_pi", 0.65}}},
                {"propagation", {{"tolerance_per_ns", 1e-6}}},
                {"output_dir", (kWork / "cz0").string()}};
    write_json(kWork / "cz0.json", cfg);
    CHECK(run("gate-cz --config " + (kWork / "cz0.json").string()) == 0);
    json result = read_json(kWork / "cz0" / "result.json");
    CHECK(result.at("fidelity").get<double>() == doctest::Approx(0.4).epsilon(0.01));
    CHECK(fs::exists(kWork / "cz0" / "pulse.csv"));
}

TEST_CASE("validation failures exit with code 2") {
    json cfg = {{"job", "derive"},
                {"circuit", config_dir() + "/dtc_three_qubit.json"},
                {"cutoffs", {{"N", 0}}},
                {"output_dir", (kWork / "bad").string()}};
    write_json(kWork / "bad.json", cfg);
    CHECK(run("derive --config " + (kWork / "bad.json").string()) == 2);
    CHECK(run("derive --config /nonexistent.json") == 2);

    json mismatched = {{"job", "spectrum"},
                       {"circuit", config_dir() + "/dtc_three_qubit.json"}};
    write_json(kWork / "mismatch.json", mismatched);
    CHECK(run("derive --config " + (kWork / "mismatch.json").string()) == 2);
}

TEST_CASE("convergence ladders run on the STC subsystem") {
    json cfg = {{"job", "convergence"},
                {"circuit", config_dir() + "/stc_two_qubit_L.json"},
                {"flux", {{"line", "L"}, {"start_over_pi", 0.0}}},
                {"convergence",
                 {{"ladder",
                   {{{"N", 5}, {"qubit_group", 20}, {"coupler_group", 8}},
                    {{"N", 5}, {"qubit_group", 30}, {"coupler_group", 11}}}}}},
                {"output_dir", (kWork / "conv").string()}};
    write_json(kWork / "conv.json", cfg);
    CHECK(run("convergence --config " + (kWork / "conv.json").string()) == 0);
    json result = read_json(kWork / "conv" / "result.json");
    CHECK(result.at("rungs") == 2);
    CHECK(std::abs(result.at("zeta_final_kHz").get<double>() + 64.0) < 25.0);
}

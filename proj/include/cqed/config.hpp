#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "cqed/optimizer.hpp"
#include "cqed/reduction.hpp"

namespace cqed {

using Json = nlohmann::json;

/// Parses the circuit description: keys `transmons`, `capacitances`
/// (sparse upper-triangular [i, j, fF] triples), `loops`, `squids`,
/// `drives`. Indices are 1-based in the file.
CircuitSpec circuit_from_json(const Json& j);

struct JobConfig {
    std::string job;
    CircuitSpec circuit;

    // Cutoffs (paper defaults: N=10, N_123=120, N_45=N_67=25, N_0=1000).
    int N = 10;
    int qubit_group_cutoff = 120;
    int coupler_group_cutoff = 25;
    int n0 = 1000;

    // Flux sweep / held values (radians internally, *_over_pi in the file).
    std::string sweep_line = "L";
    double sweep_start = 0.0;
    double sweep_stop = 0.0;
    double sweep_step = 0.0;
    FluxValues held;
    std::vector<int> zeta_qubits;  // 0-based pair for idle searches

    // Frame grid (paper default: 0.05 pi steps over [0, pi]).
    double frames_start = 0.0;
    double frames_stop = 0.0;
    double frames_step = 0.0;

    // Gate parameters.
    std::string gate_kind = "cz";
    std::vector<int> gate_qubits;  // 0-based
    double duration_ns = 30.0;
    double peak_start = 0.0;  // radians
    double peak_stop = 0.0;
    double peak_step = 0.0;
    double lambda1 = 1.0;
    double lambda2 = 0.0;
    double peak = 0.0;
    double amp_a = 0.0;
    double amp_b = 0.0;

    double prop_tol = 1e-6;
    OptimizerConfig optimizer;
    std::vector<Json> ladder;  // convergence rungs

    uint64_t seed = 1;
    int threads = 1;
    std::string output_dir = "out";
    std::string cache_dir;

    Json raw;  // resolved config (defaults applied), for hashing and manifests
};

/// Loads and validates a job configuration; fills paper defaults and
/// records them in `raw`. Throws ParseError / UnknownKey / MissingUnits /
/// InvalidCutoff.
JobConfig load_config(const std::string& path);

/// Group layout used throughout: all qubits in one group, each DTC loop
/// pair one group, each SQUID and leftover coupler a singleton group.
/// Cutoffs clamp to the group dimensions.
SystemModel::Config model_config_for(const CircuitSpec& spec, int N, int qubit_cutoff,
                                     int coupler_cutoff, long long dense_limit = 8192);

Json derived_to_json(const CircuitSpec& spec, const DerivedParams& derived);
std::string derived_table_text(const CircuitSpec& spec, const DerivedParams& derived);

std::string config_hash(const Json& j);
std::string format_double(double v);

void write_text_file(const std::string& path, const std::string& content);
void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows);

} // namespace cqed

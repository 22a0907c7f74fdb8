#pragma once

#include <map>
#include <string>
#include <vector>

#include "cqed/metrics.hpp"
#include "cqed/optimizer.hpp"
#include "cqed/pulses.hpp"
#include "cqed/spectral.hpp"

namespace cqed {

/// Everything a gate simulation needs at the idling point: the dressed
/// computational states in the frame basis, their frequencies, and the
/// qubit drive parameters.
struct GateContext {
    const SystemModel* model = nullptr;
    const Frames* frames = nullptr;
    FluxValues idle;
    int idle_node = -1;
    double theta_idle = 0.0;  // driven line value at idle

    std::vector<int> qubits;                  // global indices, ascending
    std::vector<std::vector<int>> comp_labels;  // bit order: qubits[0] is MSB
    Eigen::MatrixXcd comp_states;             // N0 x 2^nq, idle eigenstates
    Eigen::VectorXd comp_energies;            // raw (unanchored), rad/ns
    std::map<int, double> qubit_freq;         // omega_Id per qubit, rad/ns
    std::map<int, double> anharmonicity;      // eta per qubit, rad/ns
    double energy_shift = 0.0;                // conditioning shift for propagation

    int n_qubits() const { return static_cast<int>(qubits.size()); }
    int qubit_position(int global_index) const;
};

GateContext make_gate_context(const SystemModel& model, const Frames& frames,
                              const FluxValues& idle);

struct CzPulseParams {
    double lambda1 = 1.0;
    double lambda2 = 0.0;
    double theta_peak = 0.0;
    double duration = 30.0;  // ns
};

GateReport run_cz(const GateContext& ctx, const std::vector<int>& pair,
                  const CzPulseParams& pulse, const FluxMap& map,
                  const PropagateOptions& opt);

struct Pi2PulseParams {
    double amp_a = 0.0;  // 0: use the two-level seed
    double amp_b = 0.0;
    double duration = 10.0;  // ns
};

GateReport run_pi2(const GateContext& ctx, int qubit, const Pi2PulseParams& pulse,
                   const PropagateOptions& opt);

/// Rabi-area seed amplitude for the pi/2 drive on `qubit`.
double pi2_seed_amplitude(const GateContext& ctx, int qubit, double duration);

struct GateOptimizationConfig {
    OptimizerConfig opt;
    PropagateOptions propagate;
    double lambda1_min = 0.0, lambda1_max = 1.6;
    double lambda2_min = -0.6, lambda2_max = 0.6;
    int threads = 1;  // parallel peak candidates
};

struct CzCandidate {
    double theta_peak = 0.0;
    double fidelity = 0.0;
    double lambda1 = 1.0;
    double lambda2 = 0.0;
    long long evaluations = 0;
};

struct CzOptimizationResult {
    CzCandidate best;
    std::vector<CzCandidate> trace;  // one per peak candidate
    GateReport best_report;
};

CzOptimizationResult optimize_cz(const GateContext& ctx, const std::vector<int>& pair,
                                 double duration, const std::vector<double>& peak_grid,
                                 const FluxMap& map, const GateOptimizationConfig& cfg);

struct Pi2OptimizationResult {
    double amp_a = 0.0, amp_b = 0.0;
    double fidelity = 0.0;
    long long evaluations = 0;
    GateReport best_report;
    std::vector<OptimizerTracePoint> trace;
};

Pi2OptimizationResult optimize_pi2(const GateContext& ctx, int qubit, double duration,
                                   const GateOptimizationConfig& cfg);

} // namespace cqed

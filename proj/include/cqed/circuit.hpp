#pragma once

#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "cqed/errors.hpp"

namespace cqed {

/// DTC loop: two coupler transmons joined by a loop junction threaded by
/// external flux. ratio_rJ is the loop-junction critical current over the
/// mean of its two neighbors.
struct LoopSpec {
    int node_a = -1;
    int node_b = -1;
    double ratio_rJ = 0.0;
    std::string flux_line;
};

/// STC SQUID: one flux-tunable coupler transmon. asymmetry = I_cB/I_cA.
struct SquidSpec {
    int node = -1;
    double asymmetry = 0.0;
    std::string flux_line;
};

/// Circuit topology and design parameters. Indices are 0-based internally;
/// configuration files use 1-based transmon numbering.
struct CircuitSpec {
    int transmon_count = 0;
    Eigen::MatrixXd cap_matrix_fF;   // symmetric; diagonal entries are shunts
    Eigen::VectorXd bare_freqs_GHz;  // design frequency omega_i/2pi
    std::vector<LoopSpec> loops;
    std::vector<SquidSpec> squids;
    std::vector<int> drive_ports;
    std::vector<int> qubit_indices;
    std::vector<int> coupler_indices;

    bool is_qubit(int i) const;
    bool is_coupler(int i) const;
};

/// All physical parameters derived from the design values. Angular
/// frequencies in rad/ns, currents in nA.
struct DerivedParams {
    Eigen::MatrixXd W;           // capacitance-energy matrix
    Eigen::MatrixXd g;           // bare-transmon couplings, zero diagonal
    Eigen::VectorXd omega_J;     // Josephson frequencies of transmons
    Eigen::VectorXd I_c_nA;
    std::vector<double> loop_omega_J;  // per LoopSpec (loop junction)
    std::vector<double> loop_I_c_nA;
    std::vector<std::pair<double, double>> squid_omega_J;  // (A, B) halves
    Eigen::MatrixXd inv_omega_C;  // 2*hbar*C_ij/e^2, i.e. 1/omega_Cij; ns
};

struct Diagnostic {
    std::string code;
    std::string message;
};

/// Structured validation; an empty list means the spec is well formed.
std::vector<Diagnostic> validate_spec(const CircuitSpec& spec);

/// Throws Error(InvalidArgument) listing all diagnostics if any.
void require_valid(const CircuitSpec& spec);

/// M_ii = sum_j C_ij, M_ij = -C_ij. Throws NonPositiveDefinite.
Eigen::MatrixXd build_capacitance_matrix(const CircuitSpec& spec);

/// W = e^2 M^{-1} / (2 hbar), in rad/ns for M in fF. Symmetrized exactly.
Eigen::MatrixXd derive_energy_matrix(const Eigen::MatrixXd& M_fF);

/// Josephson frequencies, critical currents, couplings g_ij, loop-junction
/// and SQUID splits, and the 1/omega_C table.
DerivedParams derive_junctions(const CircuitSpec& spec, const Eigen::MatrixXd& W);

/// Convenience: validate, build M, derive W and junction parameters.
DerivedParams derive_all(const CircuitSpec& spec);

} // namespace cqed

#pragma once

#include <map>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "cqed/errors.hpp"

namespace cqed {

enum class GateKind { CZ, PiHalf };

/// Ideal gate over n qubits: CZ on a pair or the pi/2 rotation
/// (1/sqrt2) [[1,-1],[1,1]] on one qubit, identity elsewhere.
Eigen::MatrixXcd ideal_gate(GateKind kind, const std::vector<int>& acting, int n_qubits);

/// Multiplies by conj(u[0,0])/|u[0,0]| so the anchor entry is real
/// non-negative. Throws ZeroAnchor when the ground state is depleted.
Eigen::MatrixXcd fix_global_phase(const Eigen::MatrixXcd& u_raw);

struct Calibration {
    Eigen::VectorXd psi;        // pre-rotation angles, one per qubit
    Eigen::VectorXd psi_prime;  // post-rotation angles
    Eigen::MatrixXcd U;         // P_Z(psi) u' P_Z(psi')^dag
};

/// Single-qubit Z phase calibration: CZ uses the single-excitation
/// diagonal arguments; pi/2 additionally uses arg(-u'[0][s]) on the driven
/// qubit. Throws UndefinedArg when a required entry is numerically dead.
Calibration calibrate_phases(const Eigen::MatrixXcd& u_prime, GateKind kind,
                             const std::vector<int>& acting, int n_qubits);

/// (|tr(U_id^dag U')|^2 + tr(U'^dag U')) / (d (d+1)), evaluated exactly.
double average_gate_fidelity(const Eigen::MatrixXcd& U_id, const Eigen::MatrixXcd& U_prime);

struct GateDiagnostics {
    /// Spectator Rabi rotation angles: spectator qubit -> angle (rad),
    /// extracted from the {0, e_i} sub-block of the calibrated gate.
    std::map<int, double> spectator_rotation;
    double max_offdiagonal = 0.0;
    /// Off-diagonal entries above the reporting threshold: (row, col, |U|).
    std::vector<std::array<double, 3>> large_transitions;
    std::vector<double> column_leakage;
    std::vector<std::string> flags;
};

GateDiagnostics diagnostics(const Eigen::MatrixXcd& U_prime,
                            const std::vector<double>& leakage,
                            const std::vector<int>& acting, int n_qubits,
                            double transition_threshold = 1e-2);

struct GateReport {
    Eigen::MatrixXcd u_raw;
    Eigen::MatrixXcd u_prime;
    Eigen::MatrixXcd U_prime;
    Calibration calibration;
    double fidelity = 0.0;
    GateDiagnostics diag;
};

GateReport make_gate_report(const Eigen::MatrixXcd& u_raw, GateKind kind,
                            const std::vector<int>& acting, int n_qubits,
                            const std::vector<double>& leakage);

} // namespace cqed

#pragma once

#include <map>
#include <string>
#include <vector>

#include "cqed/circuit.hpp"
#include "cqed/operators.hpp"

namespace cqed {

/// Flux values per flux line id, in radians (not 2pi-wrapped).
using FluxValues = std::map<std::string, double>;

/// One flux-threaded junction element. Its potential term is
///   -(c0 + c_cos cos(Theta)) Gc - c_sin sin(Theta) Gs,
/// which covers both the DTC loop junction (c0 = 0, Gc = CC+SS,
/// Gs = CS-SC, c_cos = c_sin = omega_J_loop) and the STC SQUID
/// (c0 = omega_JA, Gc = cos_phi, Gs = sin_phi, c_cos = c_sin = omega_JB).
struct FluxElement {
    std::string flux_line;
    std::vector<int> sites;
    double coeff_static = 0.0;
    double coeff_cos = 0.0;
    double coeff_sin = 0.0;
    SparseCd Gc;
    SparseCd Gs;
    /// Flux-rate operator weights: R = sum_j rate_coeff[j] n_j, scaled by
    /// Theta_dot(t) at propagation time.
    Eigen::VectorXd rate_coeff;

    SparseCd potential_at(double theta) const;
};

/// Static, flux-dependent, flux-rate, and drive pieces of the circuit
/// Hamiltonian in the charge basis (hbar = 1; energies in rad/ns).
struct HamiltonianParts {
    CircuitSpec spec;
    DerivedParams derived;
    int cutoff_N = 0;
    std::vector<int> dims;
    SparseCd charging;        // 4 n^T W n
    SparseCd bare_junctions;  // -sum omega_Ji cos_phi_i (flux-free junctions)
    std::vector<FluxElement> flux_elements;
    std::vector<SparseCd> n_ops;  // embedded charge operators, one per mode
    /// Drive operator weights per drive port: D_i = sum_j W_ij n_j.
    std::vector<Eigen::VectorXd> drive_coeff;

    long long full_dim() const;
    SparseCd weighted_n(const Eigen::VectorXd& coeff) const;
};

/// Charging plus flux-free junction terms. SQUID-mode junction
/// coefficients stay symbolic in Theta and live in the flux elements.
HamiltonianParts assemble_static(const CircuitSpec& spec, const DerivedParams& derived, int N);

std::vector<FluxElement> assemble_flux_dependent(const CircuitSpec& spec,
                                                 const DerivedParams& derived, int N);

/// Full assembly: static parts, flux elements, control weights.
HamiltonianParts assemble(const CircuitSpec& spec, const DerivedParams& derived, int N);

/// Quasi-static Hamiltonian (Theta_dot = 0, alpha = 0).
SparseCd hamiltonian_at(const HamiltonianParts& parts, const FluxValues& fluxes);
Eigen::MatrixXcd dense_hamiltonian_at(const HamiltonianParts& parts, const FluxValues& fluxes);

struct ControlOperators {
    std::map<std::string, SparseCd> flux_rate;  // per flux line
    std::map<int, SparseCd> drive;              // per drive port
};

ControlOperators control_operators(const HamiltonianParts& parts);

/// The restriction of the model to a subset of modes: all intra-group
/// charging cross terms, the members' junctions, and any flux element
/// whose sites lie inside the group.
struct GroupProblem {
    std::vector<int> members;  // global mode indices, ascending
    std::vector<int> dims;     // local dimensions
    SparseCd static_part;
    struct LocalFlux {
        std::string flux_line;
        double coeff_static = 0.0;
        double coeff_cos = 0.0;
        double coeff_sin = 0.0;
        SparseCd Gc;
        SparseCd Gs;
    };
    std::vector<LocalFlux> flux;
    std::vector<SparseCd> n_ops;  // local, one per member

    bool flux_dependent() const { return !flux.empty(); }
    long long dim() const;
    SparseCd at(const FluxValues& fluxes) const;
};

/// With allow_straddle, flux elements that cross the group boundary are
/// dropped (used for isolated-mode reference bases); otherwise they throw.
GroupProblem group_problem(const HamiltonianParts& parts, const std::vector<int>& members,
                           bool allow_straddle = false);

} // namespace cqed

#pragma once

#include <functional>
#include <map>
#include <string>
#include <vector>

#include "cqed/reduction.hpp"

namespace cqed {

/// One labeled eigenstate. `occ` holds one occupation number per transmon
/// (global index order); `omega` is anchored so the all-zero label sits at 0.
struct LabeledLevel {
    std::vector<int> occ;
    double omega = 0.0;       // rad/ns
    double confidence = 0.0;  // squared overlap with the product reference
    int eig_index = -1;
};

struct LabeledSpectrum {
    FluxValues fluxes;
    double ground_energy = 0.0;  // raw eigenvalue of the anchor state
    std::vector<LabeledLevel> levels;
    std::vector<std::string> warnings;  // ambiguous-label reports

    const LabeledLevel* find(const std::vector<int>& occ) const;
    /// Anchored frequency; throws Error(MissingLabel) when absent.
    double omega(const std::vector<int>& occ) const;
};

/// Residual couplings at one flux point, in rad/ns. Entries are NaN when
/// the system does not define them (e.g. zeta13 with fewer than 3 qubits).
struct CouplingReport {
    FluxValues fluxes;
    double zeta12 = 0.0;
    double zeta23 = 0.0;
    double zeta13 = 0.0;
    double zeta_zzz = 0.0;
    std::map<int, double> anharmonicity;  // qubit index -> eta at this point
};

/// Computational labels, per-qubit double excitations, and single coupler
/// excitations.
std::vector<std::vector<int>> default_label_targets(const CircuitSpec& spec);

/// Per-group-level occupation labels obtained from overlaps with products
/// of isolated-mode eigenstates.
struct GroupLevelLabels {
    // [slot][level] -> occupation tuple in the group's member order;
    // empty tuple when the level stayed unlabeled.
    std::vector<std::vector<std::vector<int>>> occ;
    std::vector<std::vector<double>> confidence;

    /// Retained level index carrying `occ` in slot g, or -1.
    int level_of(int slot, const std::vector<int>& occ) const;
};

GroupLevelLabels label_group_levels(const ReducedModel& model,
                                    const std::vector<Eigen::MatrixXcd>& mode_bases);

/// Maximum-overlap labeling of reduced-model eigenpairs; injective by
/// greedy assignment over descending confidence. Ambiguous labels
/// (confidence < 0.5) are reported in `warnings`, not fatal.
LabeledSpectrum label_eigenstates(const Eigen::VectorXd& evals,
                                  const Eigen::MatrixXcd& evecs,
                                  const ReducedModel& model,
                                  const GroupLevelLabels& group_labels,
                                  const std::vector<std::vector<int>>& targets,
                                  const LabeledSpectrum* seed = nullptr);

/// Convenience: reduce, diagonalize, and label at one flux point.
LabeledSpectrum spectrum_at(const SystemModel& model, const FluxValues& fluxes,
                            const std::vector<std::vector<int>>& targets,
                            const LabeledSpectrum* seed = nullptr);

CouplingReport coupling_strengths(const LabeledSpectrum& spectrum, const CircuitSpec& spec);

/// One labeled spectrum per grid point; eigensolves run in parallel, the
/// label pass is sequential with the previous point as seed.
std::vector<LabeledSpectrum> sweep_flux(const SystemModel& model, const std::string& line,
                                        const std::vector<double>& thetas,
                                        const FluxValues& held,
                                        const std::vector<std::vector<int>>& targets,
                                        int threads = 1);

struct IdleResult {
    double theta_id = 0.0;
    double zeta_id = 0.0;  // rad/ns at the refined point
};

/// Locates the |zeta| minimum over a sampled sweep with local parabolic
/// refinement; `zeta_at` re-evaluates the model between grid points.
IdleResult find_idle(const std::vector<double>& thetas, const std::vector<double>& zetas,
                     const std::function<double(double)>& zeta_at,
                     double theta_tol = 1e-3 * 3.14159265358979323846);

} // namespace cqed

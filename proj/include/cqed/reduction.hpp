#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "cqed/eigsolve.hpp"
#include "cqed/hamiltonian.hpp"

namespace cqed {

/// One diagonalized transmon group: retained eigenpairs plus the members'
/// charge operators in the retained basis.
struct GroupReduction {
    std::vector<int> members;  // global mode indices, ascending
    int cutoff = 0;
    Eigen::VectorXd eigvals;                  // ascending, size cutoff
    Eigen::MatrixXcd basis;                   // group_full_dim x cutoff
    std::vector<Eigen::MatrixXcd> reduced_n;  // per member, cutoff x cutoff
};

GroupReduction reduce_group(const Eigen::MatrixXcd& H_group,
                            const std::vector<Eigen::MatrixXcd>& n_ops, int cutoff);
GroupReduction reduce_group(const GroupProblem& problem, const FluxValues& fluxes,
                            int cutoff, const EigenOptions& opts = {});

/// Dense embedding helpers over the product of group slots.
Eigen::MatrixXcd slot_embed(const Eigen::MatrixXcd& op, int slot, const std::vector<int>& dims);
Eigen::MatrixXcd slot_embed_two(const Eigen::MatrixXcd& op_a, int slot_a,
                                const Eigen::MatrixXcd& op_b, int slot_b,
                                const std::vector<int>& dims);

/// Applies `op` acting on one slot of the product space to every column
/// of X without materializing the embedded operator.
Eigen::MatrixXcd slot_apply(const Eigen::MatrixXcd& op, int slot,
                            const std::vector<int>& dims, const Eigen::MatrixXcd& X);

/// The reduced-size model H' = sum_g e_g + H'_int over the product of the
/// retained group bases.
struct ReducedModel {
    std::vector<GroupReduction> groups;
    std::vector<int> slot_dims;              // group cutoffs
    std::vector<int> group_of;               // transmon -> group slot
    std::vector<Eigen::MatrixXcd> n_prime;   // per transmon, embedded in product space
    Eigen::MatrixXcd h_total;                // dense H' (only when materialized)
    bool materialized = false;

    long long dim() const;
    /// Flat product-basis index for per-group level indices.
    long long flat_index(const std::vector<int>& group_levels) const;
};

/// Assembles H' from group reductions; materializes the dense matrix when
/// dim <= dense_limit, otherwise leaves it matrix-free (use apply()).
ReducedModel assemble_reduced(const std::vector<GroupReduction>& groups,
                              const Eigen::MatrixXd& W, int transmon_count,
                              long long dense_limit = 8192);

/// Matrix-free H' action (works whether or not h_total is materialized).
void apply_reduced(const ReducedModel& model, const Eigen::MatrixXd& W,
                   const Eigen::VectorXcd& x, Eigen::VectorXcd& y);

/// Aligns the columns of `cur` against `prev` (same row basis unless
/// `overlap_transform` is given): reorders near-degenerate columns by
/// descending overlap and fixes each phase so the dominant overlap is
/// real-positive. `evals` is permuted alongside.
void align_columns(Eigen::MatrixXcd& cur, Eigen::VectorXd& evals,
                   const Eigen::MatrixXcd& prev,
                   const Eigen::MatrixXcd* overlap_transform = nullptr,
                   double degeneracy_gap = 1e-9);

/// Model pipeline: circuit -> parts -> per-flux reduced models.
/// Static (flux-free) group reductions are computed once and shared.
class SystemModel {
public:
    struct Config {
        std::vector<std::vector<int>> groups;  // partition of the modes
        std::vector<int> cutoffs;              // retained dimension per group
        EigenOptions eig;
        long long dense_limit = 8192;
    };

    SystemModel(CircuitSpec spec, int N, Config cfg);

    const CircuitSpec& spec() const { return spec_; }
    const DerivedParams& derived() const { return parts_.derived; }
    const HamiltonianParts& parts() const { return parts_; }
    const Config& config() const { return cfg_; }
    int cutoff_N() const { return parts_.cutoff_N; }

    /// Group reductions at the given fluxes (static groups cached).
    std::vector<GroupReduction> reduce_groups(const FluxValues& fluxes) const;
    ReducedModel reduced_at(const FluxValues& fluxes) const;

    /// Isolated single-mode eigenbasis for each mode, used for labeling
    /// references (flux-dependent for SQUID modes).
    std::vector<Eigen::MatrixXcd> mode_bases(const FluxValues& fluxes) const;

    /// Index of the group containing the flux element driven by `line`.
    int flux_group_slot(const std::string& line) const;

private:
    CircuitSpec spec_;
    Config cfg_;
    HamiltonianParts parts_;
    std::vector<GroupProblem> problems_;
    std::vector<std::optional<GroupReduction>> static_cache_;
};

/// Flux-gridded moving frames for gate propagation (one driven flux line;
/// all other lines held fixed).
struct FrameNode {
    double theta = 0.0;
    Eigen::VectorXd e0;       // N0 retained eigenvalues
    Eigen::MatrixXcd v0;      // reduced_dim x N0, column phases aligned
    GroupReduction flux_group;
    // Frame-basis control operators (N0 x N0):
    Eigen::MatrixXcd rate_op;           // P^dag (sum_j c_j n_j) P
    Eigen::MatrixXcd gc_op, gs_op;      // P^dag Gc P, P^dag Gs P of the driven element
    std::vector<Eigen::MatrixXcd> drive_ops;  // per drive port
    Eigen::MatrixXcd t_inc, t_dec;      // switch matrices; empty at grid edges
};

struct Frames {
    std::string driven_line;
    FluxValues held;       // other lines
    double theta_start = 0.0;
    double step = 0.0;     // node spacing; bins are +-step/2 around nodes
    int n0 = 0;
    // Driven flux element coefficients (for the c-hat correction term).
    double coeff_cos = 0.0;
    double coeff_sin = 0.0;
    std::vector<int> drive_ports;  // global indices matching FrameNode::drive_ops
    std::vector<FrameNode> nodes;

    int node_count() const { return static_cast<int>(nodes.size()); }
    /// Bin R_m membership: nearest node, half-open bins [theta_m - s/2, theta_m + s/2).
    int bin_of(double theta) const;
    double node_theta(int m) const { return theta_start + m * step; }
};

struct FrameGrid {
    double start = 0.0;
    double stop = 0.0;
    double step = 0.0;
};

Frames build_frames(const SystemModel& model, const std::string& driven_line,
                    const FluxValues& held, const FrameGrid& grid, int n0);

/// P_inc (direction +1) or P_dec (direction -1) at node m, as the N0 x N0
/// coordinate map applied to state vectors at a bin crossing.
const Eigen::MatrixXcd& frame_switch(const Frames& frames, int m, int direction);

/// P(to)^dag P(from): the coordinate map between two frame nodes. The
/// identity when the nodes coincide.
Eigen::MatrixXcd frame_transfer(const FrameNode& from, const FrameNode& to,
                                int flux_slot, const std::vector<int>& slot_dims);

void save_frames(const Frames& frames, std::ostream& os);
Frames load_frames(std::istream& is);
void save_frames_file(const Frames& frames, const std::string& path);
std::optional<Frames> load_frames_file(const std::string& path);

} // namespace cqed

#include "cqed/gates.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <thread>

#include "cqed/units.hpp"

namespace cqed {

int GateContext::qubit_position(int global_index) const {
    auto it = std::find(qubits.begin(), qubits.end(), global_index);
    if (it == qubits.end())
        throw Error(ErrorCode::InvalidArgument, "not a qubit of this circuit");
    return static_cast<int>(it - qubits.begin());
}

GateContext make_gate_context(const SystemModel& model, const Frames& frames,
                              const FluxValues& idle) {
    GateContext ctx;
    ctx.model = &model;
    ctx.frames = &frames;
    ctx.idle = idle;
    auto it = idle.find(frames.driven_line);
    if (it == idle.end())
        throw Error(ErrorCode::MissingFlux, "idle point lacks the driven line");
    ctx.theta_idle = it->second;
    ctx.idle_node = frames.bin_of(ctx.theta_idle);
    if (ctx.idle_node < 0)
        throw Error(ErrorCode::RangeExit, "idle point lies outside the frame grid");
    const FrameNode& node = frames.nodes[ctx.idle_node];

    // Idle Hamiltonian in the frame basis (Theta_dot = 0, drives off).
    const int n0 = static_cast<int>(node.e0.size());
    Eigen::MatrixXcd h_idle = node.e0.cast<Complex>().asDiagonal();
    const double dc = frames.coeff_cos * (std::cos(ctx.theta_idle) - std::cos(node.theta));
    const double ds = frames.coeff_sin * (std::sin(ctx.theta_idle) - std::sin(node.theta));
    if (dc != 0.0 || ds != 0.0)
        h_idle += -dc * node.gc_op - ds * node.gs_op;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h_idle);
    if (es.info() != Eigen::Success)
        throw Error(ErrorCode::EigensolveFailure, "idle-frame eigensolve failed");
    const Eigen::MatrixXcd& w = es.eigenvectors();
    const Eigen::VectorXd& e = es.eigenvalues();

    // Group labels in the node's (aligned) reductions.
    const auto& spec = model.spec();
    FluxValues node_fluxes = frames.held;
    node_fluxes[frames.driven_line] = node.theta;
    std::vector<GroupReduction> groups = model.reduce_groups(node_fluxes);
    const int flux_slot = model.flux_group_slot(frames.driven_line);
    groups[flux_slot] = node.flux_group;
    ReducedModel structure = assemble_reduced(groups, model.derived().W,
                                              spec.transmon_count, /*dense_limit=*/0);
    GroupLevelLabels labels = label_group_levels(structure, model.mode_bases(node_fluxes));

    ctx.qubits = spec.qubit_indices;
    std::sort(ctx.qubits.begin(), ctx.qubits.end());
    const int nq = static_cast<int>(ctx.qubits.size());
    const int d = 1 << nq;

    std::vector<std::vector<int>> targets;
    for (int mask = 0; mask < d; ++mask) {
        std::vector<int> occ(spec.transmon_count, 0);
        for (int b = 0; b < nq; ++b)
            if (mask & (1 << (nq - 1 - b)))
                occ[ctx.qubits[b]] = 1;
        targets.push_back(occ);
    }
    for (int q : ctx.qubits) {
        std::vector<int> occ(spec.transmon_count, 0);
        occ[q] = 2;
        targets.push_back(occ);
    }

    // Confidence of idle eigenvector k for target t: |v0.row(ref_t) w_k|^2.
    const int n_targets = static_cast<int>(targets.size());
    Eigen::MatrixXd conf = Eigen::MatrixXd::Zero(n_targets, n0);
    std::vector<bool> resolvable(n_targets, false);
    for (int t = 0; t < n_targets; ++t) {
        std::vector<int> group_levels(groups.size());
        bool ok = true;
        for (size_t g = 0; g < groups.size(); ++g) {
            std::vector<int> local;
            for (int member : groups[g].members)
                local.push_back(targets[t][member]);
            const int level = labels.level_of(static_cast<int>(g), local);
            if (level < 0) {
                ok = false;
                break;
            }
            group_levels[g] = level;
        }
        if (!ok)
            continue;
        resolvable[t] = true;
        const long long flat = structure.flat_index(group_levels);
        Eigen::RowVectorXcd overlap = node.v0.row(flat) * w;
        conf.row(t) = overlap.cwiseAbs2();
    }

    std::vector<int> assigned(n_targets, -1);
    std::vector<char> taken(n0, 0);
    for (int round = 0; round < n_targets; ++round) {
        int best_t = -1, best_k = -1;
        double best = -1.0;
        for (int t = 0; t < n_targets; ++t) {
            if (assigned[t] >= 0 || !resolvable[t])
                continue;
            for (int k = 0; k < n0; ++k)
                if (!taken[k] && conf(t, k) > best) {
                    best = conf(t, k);
                    best_t = t;
                    best_k = k;
                }
        }
        if (best_t < 0)
            break;
        assigned[best_t] = best_k;
        taken[best_k] = 1;
    }
    for (int t = 0; t < d; ++t)
        if (assigned[t] < 0)
            throw Error(ErrorCode::MissingLabel,
                        "a computational label could not be resolved at the idle point");

    ctx.comp_labels.assign(targets.begin(), targets.begin() + d);
    ctx.comp_states.resize(n0, d);
    ctx.comp_energies.resize(d);
    for (int t = 0; t < d; ++t) {
        ctx.comp_states.col(t) = w.col(assigned[t]);
        ctx.comp_energies(t) = e(assigned[t]);
    }
    const double e_ground = ctx.comp_energies(0);
    for (int b = 0; b < nq; ++b) {
        const int q = ctx.qubits[b];
        const int idx1 = 1 << (nq - 1 - b);
        ctx.qubit_freq[q] = ctx.comp_energies(idx1) - e_ground;
        const int t2 = d + b;
        if (assigned[t2] >= 0)
            ctx.anharmonicity[q] =
                e(assigned[t2]) - 2.0 * ctx.comp_energies(idx1) + e_ground;
    }
    ctx.energy_shift = ctx.comp_energies.mean();
    return ctx;
}

GateReport run_cz(const GateContext& ctx, const std::vector<int>& pair,
                  const CzPulseParams& pulse, const FluxMap& map,
                  const PropagateOptions& opt) {
    if (pair.size() != 2)
        throw Error(ErrorCode::InvalidArgument, "CZ needs a qubit pair");
    std::vector<int> acting{ctx.qubit_position(pair[0]), ctx.qubit_position(pair[1])};
    ControlSchedule schedule =
        flux_pulse(pulse.lambda1, pulse.lambda2, pulse.theta_peak, pulse.duration,
                   ctx.theta_idle, map, ctx.frames->driven_line);
    PropagateOptions popt = opt;
    popt.energy_shift = ctx.energy_shift;
    OverlapResult ov = propagate_computational_basis(*ctx.frames, schedule, ctx.comp_states,
                                                     ctx.idle_node, popt);
    return make_gate_report(ov.u_raw, GateKind::CZ, acting, ctx.n_qubits(), ov.leakage);
}

double pi2_seed_amplitude(const GateContext& ctx, int qubit, double duration) {
    const Frames& frames = *ctx.frames;
    int slot = -1;
    for (size_t k = 0; k < frames.drive_ports.size(); ++k)
        if (frames.drive_ports[k] == qubit)
            slot = static_cast<int>(k);
    if (slot < 0)
        throw Error(ErrorCode::InvalidArgument, "qubit has no drive port");
    const FrameNode& node = frames.nodes[ctx.idle_node];
    const int b = ctx.qubit_position(qubit);
    const int idx1 = 1 << (ctx.n_qubits() - 1 - b);
    const Complex d01 = ctx.comp_states.col(idx1).adjoint() *
                        (node.drive_ops[slot] * ctx.comp_states.col(0));
    const double mag = std::abs(d01);
    if (mag < 1e-12)
        throw Error(ErrorCode::InvalidArgument, "drive matrix element vanished");
    return units::pi / (duration * mag);
}

GateReport run_pi2(const GateContext& ctx, int qubit, const Pi2PulseParams& pulse,
                   const PropagateOptions& opt) {
    const double a = pulse.amp_a != 0.0 ? pulse.amp_a
                                        : pi2_seed_amplitude(ctx, qubit, pulse.duration);
    auto eta_it = ctx.anharmonicity.find(qubit);
    if (eta_it == ctx.anharmonicity.end() || eta_it->second == 0.0)
        throw Error(ErrorCode::ZeroAnharmonicity,
                    "no anharmonicity available for the driven qubit");
    ControlSchedule schedule = drag_pulse(a, pulse.amp_b, pulse.duration,
                                          ctx.qubit_freq.at(qubit), eta_it->second, qubit);
    PropagateOptions popt = opt;
    popt.energy_shift = ctx.energy_shift;
    OverlapResult ov = propagate_computational_basis(*ctx.frames, schedule, ctx.comp_states,
                                                     ctx.idle_node, popt);
    return make_gate_report(ov.u_raw, GateKind::PiHalf, {ctx.qubit_position(qubit)},
                            ctx.n_qubits(), ov.leakage);
}

CzOptimizationResult optimize_cz(const GateContext& ctx, const std::vector<int>& pair,
                                 double duration, const std::vector<double>& peak_grid,
                                 const FluxMap& map, const GateOptimizationConfig& cfg) {
    if (peak_grid.empty())
        throw Error(ErrorCode::InvalidArgument, "empty peak grid");
    const int n_cand = static_cast<int>(peak_grid.size());
    std::vector<CzCandidate> candidates(n_cand);

    auto optimize_candidate = [&](int c) {
        const double theta_peak = peak_grid[c];
        auto cost = [&](const Eigen::VectorXd& x) {
            CzPulseParams p;
            p.lambda1 = x(0);
            p.lambda2 = x(1);
            p.theta_peak = theta_peak;
            p.duration = duration;
            try {
                return 1.0 - run_cz(ctx, pair, p, map, cfg.propagate).fidelity;
            } catch (const Error& err) {
                if (err.code() == ErrorCode::RangeExit)
                    return 2.0;  // pulse overshoot beyond the frame grid
                throw;
            }
        };
        Eigen::VectorXd x0(2), lo(2), hi(2);
        x0 << 1.0, 0.0;
        lo << cfg.lambda1_min, cfg.lambda2_min;
        hi << cfg.lambda1_max, cfg.lambda2_max;
        OptimizerResult r = minimize_bounded(cost, x0, lo, hi, cfg.opt);
        candidates[c].theta_peak = theta_peak;
        candidates[c].fidelity = 1.0 - r.best_value;
        candidates[c].lambda1 = r.best_x(0);
        candidates[c].lambda2 = r.best_x(1);
        candidates[c].evaluations = r.evaluations;
    };

    if (cfg.threads <= 1 || n_cand == 1) {
        for (int c = 0; c < n_cand; ++c)
            optimize_candidate(c);
    } else {
        const int n_workers = std::min(cfg.threads, n_cand);
        std::vector<std::thread> pool;
        std::vector<std::exception_ptr> errors(n_workers);
        std::atomic<int> next{0};
        for (int w = 0; w < n_workers; ++w)
            pool.emplace_back([&, w] {
                try {
                    for (int c = next.fetch_add(1); c < n_cand; c = next.fetch_add(1))
                        optimize_candidate(c);
                } catch (...) {
                    errors[w] = std::current_exception();
                }
            });
        for (auto& t : pool)
            t.join();
        for (auto& err : errors)
            if (err)
                std::rethrow_exception(err);
    }

    CzOptimizationResult result;
    result.trace = candidates;
    result.best = candidates[0];
    for (const auto& c : candidates)
        if (c.fidelity > result.best.fidelity)
            result.best = c;

    CzPulseParams best_pulse;
    best_pulse.lambda1 = result.best.lambda1;
    best_pulse.lambda2 = result.best.lambda2;
    best_pulse.theta_peak = result.best.theta_peak;
    best_pulse.duration = duration;
    result.best_report = run_cz(ctx, pair, best_pulse, map, cfg.propagate);
    result.best.fidelity = result.best_report.fidelity;
    return result;
}

Pi2OptimizationResult optimize_pi2(const GateContext& ctx, int qubit, double duration,
                                   const GateOptimizationConfig& cfg) {
    const double seed = pi2_seed_amplitude(ctx, qubit, duration);
    auto cost = [&](const Eigen::VectorXd& x) {
        Pi2PulseParams p;
        p.amp_a = x(0);
        p.amp_b = x(1);
        p.duration = duration;
        return 1.0 - run_pi2(ctx, qubit, p, cfg.propagate).fidelity;
    };
    Eigen::VectorXd x0(2), lo(2), hi(2);
    x0 << seed, 0.0;
    lo << 0.25 * seed, -4.0;
    hi << 4.0 * seed, 4.0;
    OptimizerResult r = minimize_bounded(cost, x0, lo, hi, cfg.opt);

    Pi2OptimizationResult out;
    out.amp_a = r.best_x(0);
    out.amp_b = r.best_x(1);
    out.evaluations = r.evaluations;
    out.trace = r.trace;
    Pi2PulseParams best;
    best.amp_a = out.amp_a;
    best.amp_b = out.amp_b;
    best.duration = duration;
    out.best_report = run_pi2(ctx, qubit, best, cfg.propagate);
    out.fidelity = out.best_report.fidelity;
    return out;
}

} // namespace cqed

#include "cqed/evolution.hpp"

#include <algorithm>
#include <cmath>

namespace cqed {

namespace {

/// Right-hand side -i H(t) y for one frame bin, with H built from the
/// node's frame-basis operators.
class FrameRhs {
public:
    FrameRhs(const Frames& frames, const FrameNode& node, const ControlSchedule& controls,
             double shift)
        : frames_(frames), node_(node), controls_(controls), shift_(shift) {
        const int n = static_cast<int>(node.e0.size());
        h_buf_.resize(n, n);
        diag_ = node.e0.array() - shift_;
        for (const auto& drive : controls.drives) {
            int slot = -1;
            for (size_t k = 0; k < frames.drive_ports.size(); ++k)
                if (frames.drive_ports[k] == drive.port)
                    slot = static_cast<int>(k);
            if (slot < 0)
                throw Error(ErrorCode::InvalidArgument,
                            "schedule drives a port without a drive operator");
            drive_slots_.push_back(slot);
        }
    }

    void operator()(double t, const Eigen::MatrixXcd& y, Eigen::MatrixXcd& dydt) {
        const int n = static_cast<int>(diag_.size());
        bool have_matrix = false;
        if (controls_.flux) {
            const double theta = controls_.flux->theta(t);
            const double theta_dot = controls_.flux->theta_dot(t);
            const double dc = frames_.coeff_cos * (std::cos(theta) - std::cos(node_.theta));
            const double ds = frames_.coeff_sin * (std::sin(theta) - std::sin(node_.theta));
            h_buf_ = theta_dot * node_.rate_op - dc * node_.gc_op - ds * node_.gs_op;
            have_matrix = true;
        }
        for (size_t k = 0; k < controls_.drives.size(); ++k) {
            const double a = controls_.drives[k].alpha(t);
            const auto& op = node_.drive_ops[drive_slots_[k]];
            if (have_matrix)
                h_buf_ += a * op;
            else {
                h_buf_ = a * op;
                have_matrix = true;
            }
        }
        if (have_matrix) {
            h_buf_.diagonal() += diag_.cast<Complex>();
            dydt.noalias() = h_buf_ * y;
            dydt *= Complex(0.0, -1.0);
        } else {
            dydt = y;
            for (int c = 0; c < y.cols(); ++c)
                dydt.col(c).array() *= diag_.array().cast<Complex>();
            dydt *= Complex(0.0, -1.0);
            (void)n;
        }
    }

private:
    const Frames& frames_;
    const FrameNode& node_;
    const ControlSchedule& controls_;
    double shift_;
    Eigen::VectorXd diag_;
    Eigen::MatrixXcd h_buf_;
    std::vector<int> drive_slots_;
};

} // namespace

PropagationResult propagate_in_frames(const Frames& frames, const ControlSchedule& controls,
                                      const Eigen::MatrixXcd& psi0, int start_node,
                                      const PropagateOptions& opt) {
    PropagationResult result;
    result.states = psi0;
    if (start_node < 0 || start_node >= frames.node_count())
        throw Error(ErrorCode::RangeExit, "start node outside the frame grid");

    IntegratorOptions iopt;
    iopt.tol = opt.tol;
    iopt.h_max = opt.h_max;

    const double T = controls.duration;
    if (T == 0.0) {
        result.final_node = start_node;
        return result;
    }

    if (!controls.flux) {
        // No bin crossings possible; a single segment covers the schedule.
        FrameRhs rhs(frames, frames.nodes[start_node], controls, opt.energy_shift);
        result.stats = integrate_adaptive(rhs, result.states, 0.0, T, iopt);
        result.final_node = start_node;
        return result;
    }

    // Walk the flux trajectory, integrating within bins and switching
    // frames exactly at the bin crossings.
    const auto& theta_of = controls.flux->theta;
    int node = frames.bin_of(theta_of(0.0));
    if (node != start_node)
        throw Error(ErrorCode::RangeExit, "psi0 is not expressed in the bin containing theta(0)");

    double t = 0.0;
    const double dir = T > 0.0 ? 1.0 : -1.0;
    const double scan = dir * std::min(std::abs(T) / 512.0, 0.05);
    while (dir * (T - t) > 1e-12) {
        // Find the earliest time in (t, T] where the bin changes.
        double t_lo = t;
        double t_hi = t;
        int next_bin = node;
        bool crossing = false;
        while (dir * (T - t_hi) > 0.0) {
            t_hi = dir * (T - (t_hi + scan)) > 0.0 ? t_hi + scan : T;
            const int b = frames.bin_of(theta_of(t_hi));
            if (b != node) {
                next_bin = b;
                crossing = true;
                break;
            }
            t_lo = t_hi;
        }

        double t_switch = T;
        if (crossing) {
            // Bisect the crossing to switch_time_tol.
            double lo = t_lo, hi = t_hi;
            while (std::abs(hi - lo) > opt.switch_time_tol) {
                const double mid = 0.5 * (lo + hi);
                if (frames.bin_of(theta_of(mid)) == node)
                    lo = mid;
                else {
                    hi = mid;
                    next_bin = frames.bin_of(theta_of(mid));
                }
            }
            t_switch = hi;
        }

        FrameRhs rhs(frames, frames.nodes[node], controls, opt.energy_shift);
        StepStats seg = integrate_adaptive(rhs, result.states, t, t_switch, iopt);
        result.stats.steps += seg.steps;
        result.stats.rejected += seg.rejected;
        result.stats.rhs_evals += seg.rhs_evals;
        t = t_switch;

        if (crossing) {
            if (next_bin < 0)
                throw Error(ErrorCode::RangeExit, "flux trajectory left the frame grid");
            if (next_bin == node + 1)
                result.states = frames.nodes[node].t_inc * result.states;
            else if (next_bin == node - 1)
                result.states = frames.nodes[node].t_dec * result.states;
            else
                throw Error(ErrorCode::RangeExit,
                            "flux trajectory skipped a frame bin; reduce the scan step");
            result.switches.push_back({t, node, next_bin});
            node = next_bin;
        }
    }
    result.final_node = node;
    return result;
}

Eigen::VectorXcd propagate_state(const Frames& frames, const ControlSchedule& controls,
                                 const Eigen::VectorXcd& psi0, int start_node,
                                 const PropagateOptions& opt) {
    Eigen::MatrixXcd block = psi0;
    PropagationResult r = propagate_in_frames(frames, controls, block, start_node, opt);
    return r.states.col(0);
}

OverlapResult propagate_computational_basis(const Frames& frames,
                                            const ControlSchedule& controls,
                                            const Eigen::MatrixXcd& label_states,
                                            int start_node, const PropagateOptions& opt) {
    OverlapResult out;
    out.propagation = propagate_in_frames(frames, controls, label_states, start_node, opt);
    out.u_raw = label_states.adjoint() * out.propagation.states;
    out.leakage.resize(out.u_raw.cols());
    for (int j = 0; j < out.u_raw.cols(); ++j)
        out.leakage[j] = 1.0 - out.u_raw.col(j).squaredNorm();
    return out;
}

} // namespace cqed

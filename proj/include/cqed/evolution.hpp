#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "cqed/integrator.hpp"
#include "cqed/reduction.hpp"

namespace cqed {

/// Time-dependent controls over [0, T]. theta_dot must be the analytic
/// derivative of the pulse parameterization.
struct FluxChannel {
    std::string line;
    std::function<double(double)> theta;
    std::function<double(double)> theta_dot;
};

struct DriveChannel {
    int port = -1;  // global transmon index; must be one of the spec's drive ports
    std::function<double(double)> alpha;
};

struct ControlSchedule {
    double duration = 0.0;  // ns
    std::optional<FluxChannel> flux;
    std::vector<DriveChannel> drives;
};

struct PropagateOptions {
    double tol = 1e-6;            // integrator local error per ns
    double energy_shift = 0.0;    // subtracted from H for conditioning
    double switch_time_tol = 1e-6;  // ns, bin-crossing localization
    double h_max = 1.0;
};

struct FrameSwitchEvent {
    double time = 0.0;
    int from_node = -1;
    int to_node = -1;
};

struct PropagationResult {
    Eigen::MatrixXcd states;  // one column per initial state, idle-frame basis
    std::vector<FrameSwitchEvent> switches;
    StepStats stats;
    int final_node = -1;
};

/// Propagates columns of psi0 through the schedule with frame switching at
/// bin crossings. States are expressed in the frame basis throughout.
PropagationResult propagate_in_frames(const Frames& frames, const ControlSchedule& controls,
                                      const Eigen::MatrixXcd& psi0, int start_node,
                                      const PropagateOptions& opt);

/// Single-state convenience wrapper.
Eigen::VectorXcd propagate_state(const Frames& frames, const ControlSchedule& controls,
                                 const Eigen::VectorXcd& psi0, int start_node,
                                 const PropagateOptions& opt);

struct OverlapResult {
    Eigen::MatrixXcd u_raw;       // <label_i | tilde label_j>
    std::vector<double> leakage;  // per column: 1 - sum_i |u_raw(i,j)|^2
    PropagationResult propagation;
};

/// Propagates the given label states (columns) and measures raw overlaps
/// against the same states.
OverlapResult propagate_computational_basis(const Frames& frames,
                                            const ControlSchedule& controls,
                                            const Eigen::MatrixXcd& label_states,
                                            int start_node, const PropagateOptions& opt);

} // namespace cqed

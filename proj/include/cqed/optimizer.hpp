#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include <Eigen/Dense>

namespace cqed {

struct OptimizerConfig {
    int max_iterations = 15;
    long long max_evaluations = 2000;
    double grad_step = 1e-4;     // central-difference step per parameter
    double gradient_tol = 1e-7;
    double step_tol = 1e-11;
    int threads = 1;             // parallel stencil evaluations
    uint64_t seed = 0;           // recorded for reproducibility metadata
};

struct OptimizerTracePoint {
    Eigen::VectorXd x;
    double value = 0.0;
};

struct OptimizerResult {
    Eigen::VectorXd best_x;
    double best_value = 0.0;
    long long evaluations = 0;
    int iterations = 0;
    bool converged = false;
    bool budget_exhausted = false;
    std::vector<OptimizerTracePoint> trace;
};

/// Box-bounded BFGS with central-difference gradients and backtracking
/// line search. Deterministic for a fixed configuration.
OptimizerResult minimize_bounded(const std::function<double(const Eigen::VectorXd&)>& cost,
                                 const Eigen::VectorXd& x0, const Eigen::VectorXd& lower,
                                 const Eigen::VectorXd& upper, const OptimizerConfig& cfg);

} // namespace cqed

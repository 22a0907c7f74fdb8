#include "cqed/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <future>

#include "cqed/errors.hpp"

namespace cqed {

namespace {

Eigen::VectorXd clamp_to_box(Eigen::VectorXd x, const Eigen::VectorXd& lo,
                             const Eigen::VectorXd& hi) {
    for (int k = 0; k < x.size(); ++k)
        x(k) = std::clamp(x(k), lo(k), hi(k));
    return x;
}

} // namespace

OptimizerResult minimize_bounded(const std::function<double(const Eigen::VectorXd&)>& cost,
                                 const Eigen::VectorXd& x0, const Eigen::VectorXd& lower,
                                 const Eigen::VectorXd& upper, const OptimizerConfig& cfg) {
    const int n = static_cast<int>(x0.size());
    if (lower.size() != n || upper.size() != n)
        throw Error(ErrorCode::InvalidArgument, "bound dimensions do not match x0");

    OptimizerResult result;
    long long evals = 0;

    auto eval = [&](const Eigen::VectorXd& x) {
        ++evals;
        const double v = cost(x);
        result.trace.push_back({x, v});
        return v;
    };

    auto gradient = [&](const Eigen::VectorXd& x, Eigen::VectorXd& g) -> bool {
        if (evals + 2 * n > cfg.max_evaluations)
            return false;
        std::vector<Eigen::VectorXd> stencil;
        for (int k = 0; k < n; ++k) {
            Eigen::VectorXd xp = x, xm = x;
            xp(k) = std::min(x(k) + cfg.grad_step, upper(k));
            xm(k) = std::max(x(k) - cfg.grad_step, lower(k));
            stencil.push_back(xp);
            stencil.push_back(xm);
        }
        std::vector<double> values(stencil.size());
        if (cfg.threads > 1) {
            std::vector<std::future<double>> futures;
            futures.reserve(stencil.size());
            for (const auto& p : stencil)
                futures.push_back(std::async(std::launch::async, cost, p));
            for (size_t i = 0; i < futures.size(); ++i)
                values[i] = futures[i].get();
            for (size_t i = 0; i < stencil.size(); ++i)
                result.trace.push_back({stencil[i], values[i]});
            evals += static_cast<long long>(stencil.size());
        } else {
            for (size_t i = 0; i < stencil.size(); ++i)
                values[i] = eval(stencil[i]);
        }
        g.resize(n);
        for (int k = 0; k < n; ++k) {
            const double span = stencil[2 * k](k) - stencil[2 * k + 1](k);
            g(k) = span > 0.0 ? (values[2 * k] - values[2 * k + 1]) / span : 0.0;
        }
        return true;
    };

    Eigen::VectorXd x = clamp_to_box(x0, lower, upper);
    double fx = eval(x);
    result.best_x = x;
    result.best_value = fx;

    Eigen::MatrixXd h_inv = Eigen::MatrixXd::Identity(n, n);
    Eigen::VectorXd g(n), g_new(n);
    if (!gradient(x, g)) {
        result.evaluations = evals;
        result.budget_exhausted = true;
        return result;
    }

    for (int iter = 0; iter < cfg.max_iterations; ++iter) {
        result.iterations = iter + 1;
        if (g.lpNorm<Eigen::Infinity>() < cfg.gradient_tol) {
            result.converged = true;
            break;
        }
        Eigen::VectorXd direction = -h_inv * g;
        if (direction.dot(g) > 0.0)
            direction = -g;  // reset on a non-descent direction

        // Backtracking line search with box projection.
        double step = 1.0;
        double f_trial = fx;
        Eigen::VectorXd x_trial = x;
        bool accepted = false;
        for (int ls = 0; ls < 10; ++ls) {
            if (evals >= cfg.max_evaluations) {
                result.budget_exhausted = true;
                break;
            }
            x_trial = clamp_to_box(x + step * direction, lower, upper);
            if ((x_trial - x).lpNorm<Eigen::Infinity>() < cfg.step_tol)
                break;
            f_trial = eval(x_trial);
            if (f_trial <= fx + 1e-4 * g.dot(x_trial - x)) {
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if (result.budget_exhausted || !accepted)
            break;

        if (!gradient(x_trial, g_new)) {
            x = x_trial;
            fx = f_trial;
            if (fx < result.best_value) {
                result.best_value = fx;
                result.best_x = x;
            }
            result.budget_exhausted = true;
            break;
        }

        // Damped BFGS update of the inverse Hessian.
        const Eigen::VectorXd s = x_trial - x;
        const Eigen::VectorXd yv = g_new - g;
        const double sy = s.dot(yv);
        if (sy > 1e-12 * s.norm() * yv.norm()) {
            const double rho = 1.0 / sy;
            const Eigen::MatrixXd eye = Eigen::MatrixXd::Identity(n, n);
            h_inv = (eye - rho * s * yv.transpose()) * h_inv *
                        (eye - rho * yv * s.transpose()) +
                    rho * s * s.transpose();
        }
        x = x_trial;
        fx = f_trial;
        g = g_new;
        if (fx < result.best_value) {
            result.best_value = fx;
            result.best_x = x;
        }
        if (s.lpNorm<Eigen::Infinity>() < cfg.step_tol) {
            result.converged = true;
            break;
        }
    }
    result.evaluations = evals;
    return result;
}

} // namespace cqed

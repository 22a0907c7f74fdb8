#pragma once

#include <cmath>

#include <Eigen/Dense>

#include "cqed/errors.hpp"

namespace cqed {

struct IntegratorOptions {
    double tol = 1e-6;     // local error budget per ns of integration
    double h_init = 1e-3;  // ns
    double h_min = 1e-10;
    double h_max = 1.0;
};

struct StepStats {
    long long steps = 0;
    long long rejected = 0;
    long long rhs_evals = 0;
};

/// Dormand-Prince 5(4) with PI-free standard step control, FSAL. The state
/// is a complex matrix (columns propagate together). Integrates from t0 to
/// t1 in either direction. Rhs signature:
///   void rhs(double t, const Eigen::MatrixXcd& y, Eigen::MatrixXcd& dydt)
template <typename Rhs>
StepStats integrate_adaptive(Rhs&& rhs, Eigen::MatrixXcd& y, double t0, double t1,
                             const IntegratorOptions& opt) {
    StepStats stats;
    if (t0 == t1)
        return stats;
    const double dir = t1 > t0 ? 1.0 : -1.0;
    double t = t0;
    double h = dir * std::min(opt.h_init, std::abs(t1 - t0));

    Eigen::MatrixXcd k1(y.rows(), y.cols()), k2(y.rows(), y.cols()), k3(y.rows(), y.cols()),
        k4(y.rows(), y.cols()), k5(y.rows(), y.cols()), k6(y.rows(), y.cols()),
        k7(y.rows(), y.cols()), ytmp(y.rows(), y.cols()), ynew(y.rows(), y.cols());

    rhs(t, y, k1);
    ++stats.rhs_evals;

    bool fsal_valid = true;
    while (dir * (t1 - t) > 0.0) {
        if (std::abs(h) > std::abs(t1 - t))
            h = t1 - t;
        if (!fsal_valid) {
            rhs(t, y, k1);
            ++stats.rhs_evals;
            fsal_valid = true;
        }

        ytmp = y + h * (1.0 / 5.0) * k1;
        rhs(t + h / 5.0, ytmp, k2);
        ytmp = y + h * ((3.0 / 40.0) * k1 + (9.0 / 40.0) * k2);
        rhs(t + 3.0 * h / 10.0, ytmp, k3);
        ytmp = y + h * ((44.0 / 45.0) * k1 + (-56.0 / 15.0) * k2 + (32.0 / 9.0) * k3);
        rhs(t + 4.0 * h / 5.0, ytmp, k4);
        ytmp = y + h * ((19372.0 / 6561.0) * k1 + (-25360.0 / 2187.0) * k2 +
                        (64448.0 / 6561.0) * k3 + (-212.0 / 729.0) * k4);
        rhs(t + 8.0 * h / 9.0, ytmp, k5);
        ytmp = y + h * ((9017.0 / 3168.0) * k1 + (-355.0 / 33.0) * k2 +
                        (46732.0 / 5247.0) * k3 + (49.0 / 176.0) * k4 +
                        (-5103.0 / 18656.0) * k5);
        rhs(t + h, ytmp, k6);
        ynew = y + h * ((35.0 / 384.0) * k1 + (500.0 / 1113.0) * k3 + (125.0 / 192.0) * k4 +
                        (-2187.0 / 6784.0) * k5 + (11.0 / 84.0) * k6);
        rhs(t + h, ynew, k7);
        stats.rhs_evals += 6;

        // Embedded 4th-order error estimate.
        ytmp = h * ((71.0 / 57600.0) * k1 + (-71.0 / 16695.0) * k3 + (71.0 / 1920.0) * k4 +
                    (-17253.0 / 339200.0) * k5 + (22.0 / 525.0) * k6 + (-1.0 / 40.0) * k7);
        const double err = ytmp.norm();
        const double budget = opt.tol * std::abs(h);

        if (err <= budget) {
            t += h;
            y.swap(ynew);
            k1.swap(k7);  // FSAL
            ++stats.steps;
            const double grow = err > 0.0 ? 0.9 * std::pow(budget / err, 0.2) : 5.0;
            h *= std::clamp(grow, 0.2, 5.0);
            if (std::abs(h) > opt.h_max)
                h = dir * opt.h_max;
        } else {
            ++stats.rejected;
            fsal_valid = false;
            h *= std::max(0.2, 0.9 * std::pow(budget / err, 0.2));
            if (std::abs(h) < opt.h_min)
                throw Error(ErrorCode::StepFailure,
                            "integrator cannot meet tolerance at minimum step size");
        }
    }
    return stats;
}

} // namespace cqed

#pragma once

#include <array>
#include <string>
#include <vector>

#include "cqed/evolution.hpp"

namespace cqed {

/// Monotone control-coordinate map for flux pulses. Identity by default;
/// a tabulated variant interpolates sweep data with a monotone cubic
/// (Fritsch-Carlson) so the inverse and derivative stay smooth.
class FluxMap {
public:
    static FluxMap identity();
    /// Strictly monotone samples (theta ascending). Throws NonMonotoneMap.
    static FluxMap tabulated(std::vector<double> thetas, std::vector<double> values);

    bool is_identity() const { return identity_; }
    double f(double theta) const;
    double f_prime(double theta) const;
    double f_inverse(double y) const;

private:
    FluxMap() = default;
    bool identity_ = true;
    bool increasing_ = true;
    std::vector<double> x_, y_, slope_;
    int interval_of(double x) const;
};

/// theta(t) = f(Theta_Id) + (f(Theta_P) - f(Theta_Id))/2 sum_n lambda_n
/// (1 - cos(2 n pi t / T)), Theta(t) = f^{-1}(theta(t)); lambda3 = 1 -
/// lambda1 by construction.
ControlSchedule flux_pulse(double lambda1, double lambda2, double theta_peak, double T,
                           double theta_idle, const FluxMap& map, const std::string& line);

/// DRAG-like drive alpha(t) = A(t) sin(w t) + B(t) cos(w t) with
/// A = a (1 - cos(2 pi t/T))/2 and B = b (pi/T)(1/eta) sin(2 pi t/T).
ControlSchedule drag_pulse(double a, double b, double T, double omega_drive, double eta,
                           int port);

/// Evenly sampled (t, value) table of a schedule channel, for export.
std::vector<std::pair<double, double>> sample_flux(const ControlSchedule& schedule, int count);
std::vector<std::pair<double, double>> sample_drive(const ControlSchedule& schedule, int count);

} // namespace cqed

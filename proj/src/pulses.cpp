#include "cqed/pulses.hpp"

#include <algorithm>
#include <cmath>

#include "cqed/units.hpp"

namespace cqed {

FluxMap FluxMap::identity() {
    FluxMap m;
    m.identity_ = true;
    return m;
}

FluxMap FluxMap::tabulated(std::vector<double> thetas, std::vector<double> values) {
    if (thetas.size() != values.size() || thetas.size() < 2)
        throw Error(ErrorCode::NonMonotoneMap, "tabulated map needs >= 2 samples");
    for (size_t k = 1; k < thetas.size(); ++k)
        if (thetas[k] <= thetas[k - 1])
            throw Error(ErrorCode::NonMonotoneMap, "theta samples must be strictly increasing");
    bool inc = values[1] > values[0];
    for (size_t k = 1; k < values.size(); ++k) {
        if (inc && values[k] <= values[k - 1])
            throw Error(ErrorCode::NonMonotoneMap, "map values are not strictly monotone");
        if (!inc && values[k] >= values[k - 1])
            throw Error(ErrorCode::NonMonotoneMap, "map values are not strictly monotone");
    }

    FluxMap m;
    m.identity_ = false;
    m.increasing_ = inc;
    m.x_ = std::move(thetas);
    m.y_ = std::move(values);

    // Fritsch-Carlson monotone cubic slopes.
    const size_t n = m.x_.size();
    std::vector<double> d(n - 1);
    for (size_t k = 0; k + 1 < n; ++k)
        d[k] = (m.y_[k + 1] - m.y_[k]) / (m.x_[k + 1] - m.x_[k]);
    m.slope_.resize(n);
    m.slope_[0] = d[0];
    m.slope_[n - 1] = d[n - 2];
    for (size_t k = 1; k + 1 < n; ++k)
        m.slope_[k] = (d[k - 1] * d[k] > 0.0) ? 2.0 / (1.0 / d[k - 1] + 1.0 / d[k]) : 0.0;
    for (size_t k = 0; k + 1 < n; ++k) {
        if (d[k] == 0.0) {
            m.slope_[k] = m.slope_[k + 1] = 0.0;
            continue;
        }
        const double a = m.slope_[k] / d[k];
        const double b = m.slope_[k + 1] / d[k];
        const double s = a * a + b * b;
        if (s > 9.0) {
            const double tau = 3.0 / std::sqrt(s);
            m.slope_[k] = tau * a * d[k];
            m.slope_[k + 1] = tau * b * d[k];
        }
    }
    return m;
}

int FluxMap::interval_of(double x) const {
    const int n = static_cast<int>(x_.size());
    if (x <= x_.front())
        return 0;
    if (x >= x_.back())
        return n - 2;
    int lo = 0, hi = n - 1;
    while (hi - lo > 1) {
        const int mid = (lo + hi) / 2;
        (x_[mid] <= x ? lo : hi) = mid;
    }
    return lo;
}

double FluxMap::f(double theta) const {
    if (identity_)
        return theta;
    const int k = interval_of(theta);
    const double h = x_[k + 1] - x_[k];
    const double t = (theta - x_[k]) / h;
    const double h00 = (1.0 + 2.0 * t) * (1.0 - t) * (1.0 - t);
    const double h10 = t * (1.0 - t) * (1.0 - t);
    const double h01 = t * t * (3.0 - 2.0 * t);
    const double h11 = t * t * (t - 1.0);
    return h00 * y_[k] + h10 * h * slope_[k] + h01 * y_[k + 1] + h11 * h * slope_[k + 1];
}

double FluxMap::f_prime(double theta) const {
    if (identity_)
        return 1.0;
    const int k = interval_of(theta);
    const double h = x_[k + 1] - x_[k];
    const double t = (theta - x_[k]) / h;
    const double dh00 = 6.0 * t * (t - 1.0);
    const double dh10 = (1.0 - t) * (1.0 - 3.0 * t);
    const double dh01 = -dh00;
    const double dh11 = t * (3.0 * t - 2.0);
    return (dh00 * y_[k] + dh01 * y_[k + 1]) / h + dh10 * slope_[k] + dh11 * slope_[k + 1];
}

double FluxMap::f_inverse(double y) const {
    if (identity_)
        return y;
    double lo = x_.front(), hi = x_.back();
    const double y_lo = increasing_ ? y_.front() : y_.back();
    const double y_hi = increasing_ ? y_.back() : y_.front();
    if (y <= std::min(y_lo, y_hi))
        return increasing_ ? lo : hi;
    if (y >= std::max(y_lo, y_hi))
        return increasing_ ? hi : lo;
    for (int iter = 0; iter < 80 && (hi - lo) > 1e-14 * (x_.back() - x_.front()); ++iter) {
        const double mid = 0.5 * (lo + hi);
        const bool below = increasing_ ? (f(mid) < y) : (f(mid) > y);
        (below ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

ControlSchedule flux_pulse(double lambda1, double lambda2, double theta_peak, double T,
                           double theta_idle, const FluxMap& map, const std::string& line) {
    if (T <= 0.0)
        throw Error(ErrorCode::InvalidArgument, "pulse duration must be positive");
    const double lambda3 = 1.0 - lambda1;
    const double f_idle = map.f(theta_idle);
    const double f_peak = map.f(theta_peak);
    const double half_span = 0.5 * (f_peak - f_idle);
    const std::array<double, 3> lambda{lambda1, lambda2, lambda3};

    FluxMap m = map;
    ControlSchedule schedule;
    schedule.duration = T;
    FluxChannel channel;
    channel.line = line;
    channel.theta = [=](double t) {
        double s = 0.0;
        for (int n = 1; n <= 3; ++n)
            s += lambda[n - 1] * (1.0 - std::cos(2.0 * n * units::pi * t / T));
        return m.f_inverse(f_idle + half_span * s);
    };
    channel.theta_dot = [=](double t) {
        double ds = 0.0;
        for (int n = 1; n <= 3; ++n)
            ds += lambda[n - 1] * (2.0 * n * units::pi / T) * std::sin(2.0 * n * units::pi * t / T);
        const double theta_dot_coord = half_span * ds;
        double s = 0.0;
        for (int n = 1; n <= 3; ++n)
            s += lambda[n - 1] * (1.0 - std::cos(2.0 * n * units::pi * t / T));
        const double theta = m.f_inverse(f_idle + half_span * s);
        return theta_dot_coord / m.f_prime(theta);
    };
    schedule.flux = std::move(channel);
    return schedule;
}

ControlSchedule drag_pulse(double a, double b, double T, double omega_drive, double eta,
                           int port) {
    if (T <= 0.0)
        throw Error(ErrorCode::InvalidArgument, "pulse duration must be positive");
    if (eta == 0.0)
        throw Error(ErrorCode::ZeroAnharmonicity, "DRAG pulse needs a nonzero anharmonicity");
    ControlSchedule schedule;
    schedule.duration = T;
    DriveChannel channel;
    channel.port = port;
    channel.alpha = [=](double t) {
        const double A = 0.5 * a * (1.0 - std::cos(2.0 * units::pi * t / T));
        const double B = b * (units::pi / T) / eta * std::sin(2.0 * units::pi * t / T);
        return A * std::sin(omega_drive * t) + B * std::cos(omega_drive * t);
    };
    schedule.drives.push_back(std::move(channel));
    return schedule;
}

std::vector<std::pair<double, double>> sample_flux(const ControlSchedule& schedule, int count) {
    std::vector<std::pair<double, double>> out;
    if (!schedule.flux || count < 2)
        return out;
    for (int k = 0; k < count; ++k) {
        const double t = schedule.duration * k / (count - 1);
        out.emplace_back(t, schedule.flux->theta(t));
    }
    return out;
}

std::vector<std::pair<double, double>> sample_drive(const ControlSchedule& schedule, int count) {
    std::vector<std::pair<double, double>> out;
    if (schedule.drives.empty() || count < 2)
        return out;
    for (int k = 0; k < count; ++k) {
        const double t = schedule.duration * k / (count - 1);
        out.emplace_back(t, schedule.drives.front().alpha(t));
    }
    return out;
}

} // namespace cqed

#pragma once

#include <cmath>

// Internal unit system: angular frequency in rad/ns, time in ns,
// capacitance in fF, current in nA. Inputs and outputs use plain
// frequency (GHz/MHz/kHz); conversion happens at the boundary.

namespace cqed::units {

inline constexpr double pi = 3.14159265358979323846;
inline constexpr double two_pi = 2.0 * pi;

// CODATA 2018 values.
inline constexpr double elementary_charge_C = 1.602176634e-19;
inline constexpr double hbar_Js = 1.054571817e-34;
// Reduced flux quantum hbar/(2e), in Wb.
inline constexpr double phi0_Wb = hbar_Js / (2.0 * elementary_charge_C);

// e^2/(2*hbar*C) for C in fF, result in rad/ns.
inline constexpr double charging_rate_coeff =
    elementary_charge_C * elementary_charge_C / (2.0 * hbar_Js) * 1.0e6;

inline constexpr double ghz_to_radns(double f_GHz) { return two_pi * f_GHz; }
inline constexpr double radns_to_ghz(double w) { return w / two_pi; }
inline constexpr double radns_to_mhz(double w) { return 1.0e3 * w / two_pi; }
inline constexpr double radns_to_khz(double w) { return 1.0e6 * w / two_pi; }

// Critical current in nA from a Josephson frequency in rad/ns:
// I_c = hbar*omega_J/phi0 = 2e*omega_J.
inline constexpr double critical_current_nA(double omega_J_radns) {
    return 2.0 * elementary_charge_C * omega_J_radns * 1.0e18;
}

} // namespace cqed::units

#pragma once

#include <numbers>

// Internal unit system: angular frequency in rad/us, time in us, temperature in K.
namespace thermchan::units {

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

// hbar / k_B in K*us.
inline constexpr double kHbarOverKb = 7.6382e-6;

constexpr double ghz(double f) { return kTwoPi * 1e3 * f; }
constexpr double mhz(double f) { return kTwoPi * f; }
constexpr double khz(double f) { return kTwoPi * 1e-3 * f; }

constexpr double to_ghz(double omega) { return omega / (kTwoPi * 1e3); }
constexpr double to_mhz(double omega) { return omega / kTwoPi; }

}  // namespace thermchan::units

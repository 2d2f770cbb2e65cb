#pragma once

#include <numbers>

// Physical constants, SI units unless noted.
namespace lpisim::constants {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kSpeedOfLight = 299792458.0;            // m/s
inline constexpr double kEarthGM = 3.986004418e14;              // m^3/s^2
inline constexpr double kEarthRadius = 6.371e6;                 // m, spherical
inline constexpr double kEarthRotationRate = 7.2921159e-5;      // rad/s
inline constexpr double kStandardGravity = 9.81;                // m/s^2
inline constexpr double kHbar = 1.054571817e-34;                // J s
inline constexpr double kElectronVolt = 1.602176634e-19;        // J
inline constexpr double kBohrMagnetonEv = 5.7884e-5;            // eV/T
inline constexpr double kSecondsPerDay = 86400.0;

}  // namespace lpisim::constants

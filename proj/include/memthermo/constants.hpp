#pragma once

namespace memthermo {

inline constexpr double kBoltzmannEv = 8.617333262e-5;  // eV/K

inline constexpr double kReferenceTemperature = 300.0;  // K
inline constexpr double kMinTemperature = 300.0;        // chamber limits, K
inline constexpr double kMaxTemperature = 360.0;

inline constexpr double kReadVoltage = 0.2;  // V

// Hard resistance bounds for state updates, interpolation and root finding.
inline constexpr double kResistanceFloor = 1.0e3;     // ohm
inline constexpr double kResistanceCeiling = 30.0e6;  // ohm

// Lowest apparent barrier for which R(T) stays strictly decreasing on
// [300, 360] K: d ln(rho)/dT = -2/T - phi/(k T^2) < 0 everywhere.
inline constexpr double kPhiMonotonicityBound = -2.0 * kBoltzmannEv * kMinTemperature;

}  // namespace memthermo

#pragma once

#include <span>
#include <utility>
#include <vector>

#include "memthermo/device.hpp"

namespace memthermo {

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;  // 1 when the residual vanishes, including constant data
};

// Ordinary least squares. Throws std::invalid_argument on fewer than two
// points or a singular design (all x equal).
LinearFit linear_fit(std::span<const double> x, std::span<const double> y);

// ---------------------------------------------------------------------------
// Signature-plot extraction
// ---------------------------------------------------------------------------

struct IVPoint {
  double v = 0.0;  // V
  double i = 0.0;  // A
};

struct IVCurve {
  double temperature = 300.0;  // K
  std::vector<IVPoint> points;
};

struct IVCurveSet {
  std::vector<IVCurve> curves;
};

struct SignaturePoint {
  double v = 0.0;
  double temperature = 0.0;
  double inv_t = 0.0;        // 1/K
  double ln_i_over_t2 = 0.0;
};

// Signature-plot coordinates for every sample with non-zero current.
std::vector<SignaturePoint> signature_points(const IVCurveSet& ivs);

struct VoltageFit {
  double v = 0.0;
  LinearFit fit;             // ln(I/T^2) against 1/T
  double apparent_barrier;   // -k_B * slope, eV
};

struct PolarityFit {
  std::vector<VoltageFit> per_voltage;
  LinearFit barrier_fit;  // apparent barrier against sqrt|v|
  double phi_b = 0.0;
  double alpha = 0.0;
};

struct ExtractionDiagnostics {
  double stage1_min_r2 = 0.0;
  double stage2_r2_pos = 0.0;
  double stage2_r2_neg = 0.0;
  // Spread (max - min) of the stage-1 intercepts, which thermionic data
  // shares across voltages as ln(A).
  double intercept_spread = 0.0;
  double phi_b_pos = 0.0;
  double phi_b_neg = 0.0;
  // All R^2 above 0.999, intercepts agree within 1e-3 and the barrier is
  // non-negative.
  bool thermionic_consistent = false;
};

struct ExtractionResult {
  ThermionicParams params;
  PolarityFit positive;
  PolarityFit negative;
  ExtractionDiagnostics diagnostics;
};

// Stage 1: per voltage, regress ln(I/T^2) on 1/T. Stage 2: per polarity,
// regress -k_B * slope on sqrt|v| for phi_b (intercept) and alpha (-slope).
// Needs >= 3 temperatures and >= 3 voltages of each polarity present at
// every temperature. Throws ExtractionError naming the failing stage.
ExtractionResult extract_thermionic(const IVCurveSet& ivs);

// ---------------------------------------------------------------------------
// Static sensitivity
// ---------------------------------------------------------------------------

struct SettledPoint {
  double temperature = 300.0;
  double r = 0.0;
};

// Least-squares slope of 100 (R/R300 - 1) against (T - 300), %/K. Several
// points at 300 K are averaged for the baseline. Throws CalibrationError
// without a 300 K point.
double sensitivity_percent_per_K(std::span<const SettledPoint> trace);

// ---------------------------------------------------------------------------
// Memristor thermometer
// ---------------------------------------------------------------------------

struct ThermometerReading {
  double temperature = 300.0;
  bool clamped = false;  // measured value lay in the guard band past an edge
};

inline constexpr double kThermometerGuard = 0.02;

class Thermometer {
 public:
  Thermometer(ThermalFit fit, double r_eff, double guard = kThermometerGuard);

  // Resistance at 360 K and 300 K.
  double band_low() const { return band_low_; }
  double band_high() const { return band_high_; }
  double guard() const { return guard_; }

  // Bisection to well below 0.01 K. Outside band +/- guard throws
  // OutOfRangeError carrying the band.
  ThermometerReading invert(double r_measured) const;

 private:
  ThermalFit fit_;
  DeviceState state_;
  double guard_;
  double band_low_;
  double band_high_;
};

double invert_temperature(double r_measured, const ThermalFit& fit, double r_eff,
                          double guard = kThermometerGuard);

// ---------------------------------------------------------------------------
// Switching-curve fit
// ---------------------------------------------------------------------------

struct NullclinePoint {
  double v = 0.0;
  double temperature = 0.0;
  double fraction = 0.0;
};

struct SwitchCurveFit {
  double g_14_310 = 0.0;
  double g_14_360 = 0.0;
  double beta = 0.0;
};

// beta from log-linear regression of |fraction| on v (v <= 1.4 V, per
// temperature, averaged); g_14_310 and g_14_360 from a linear regression in T
// of the 1.4 V fractions inside [310, 360] K. Fractions are divided by
// `saturation` first, which lets finite-length train grids be fitted.
// Throws CalibrationError when the grid has too little supra-threshold data.
SwitchCurveFit fit_switch_curve(std::span<const NullclinePoint> grid, double saturation = 1.0);

}  // namespace memthermo

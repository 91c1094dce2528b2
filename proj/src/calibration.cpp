#include "memthermo/calibration.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <stdexcept>
#include <string>

#include <boost/math/tools/roots.hpp>

#include "memthermo/errors.hpp"

namespace memthermo {

LinearFit linear_fit(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw std::invalid_argument("x and y differ in length");
  if (x.size() < 2) throw std::invalid_argument("regression needs at least two points");
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = x[i] - mx;
    const double dy = y[i] - my;
    sxx += dx * dx;
    sxy += dx * dy;
    syy += dy * dy;
  }
  if (!(sxx > 0.0)) throw std::invalid_argument("singular design: all x values equal");
  LinearFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  double ss_res = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double e = y[i] - (f.intercept + f.slope * x[i]);
    ss_res += e * e;
  }
  // Residuals at round-off level relative to the data count as a perfect fit.
  const double scale = std::max(std::abs(my), 1.0) * 1e-12;
  if (syy == 0.0 || ss_res <= n * scale * scale) {
    f.r2 = ss_res <= n * scale * scale ? 1.0 : 0.0;
  } else {
    f.r2 = 1.0 - ss_res / syy;
  }
  return f;
}

std::vector<SignaturePoint> signature_points(const IVCurveSet& ivs) {
  std::vector<SignaturePoint> out;
  for (const auto& curve : ivs.curves) {
    for (const auto& p : curve.points) {
      if (p.i == 0.0) continue;
      const double t = curve.temperature;
      out.push_back({p.v, t, 1.0 / t, std::log(std::abs(p.i) / (t * t))});
    }
  }
  return out;
}

namespace {

PolarityFit fit_polarity(const std::map<double, std::vector<std::pair<double, double>>>& by_v,
                         bool positive, double& min_r2, std::vector<double>& intercepts) {
  PolarityFit pf;
  std::vector<double> sqrt_v, barrier;
  const char* stage1 = positive ? "stage 1 (positive bias)" : "stage 1 (negative bias)";
  for (const auto& [v, samples] : by_v) {
    if ((v > 0.0) != positive) continue;
    std::vector<double> x, y;
    for (const auto& [t, i] : samples) {
      x.push_back(1.0 / t);
      y.push_back(std::log(std::abs(i) / (t * t)));
    }
    LinearFit fit;
    try {
      fit = linear_fit(x, y);
    } catch (const std::invalid_argument& e) {
      throw ExtractionError(stage1, e.what());
    }
    const double apparent = -kBoltzmannEv * fit.slope;
    pf.per_voltage.push_back({v, fit, apparent});
    min_r2 = std::min(min_r2, fit.r2);
    intercepts.push_back(fit.intercept);
    sqrt_v.push_back(std::sqrt(std::abs(v)));
    barrier.push_back(apparent);
  }
  const char* stage2 = positive ? "stage 2 (positive bias)" : "stage 2 (negative bias)";
  if (sqrt_v.size() < 3) throw ExtractionError(stage2, "fewer than 3 voltages");
  try {
    pf.barrier_fit = linear_fit(sqrt_v, barrier);
  } catch (const std::invalid_argument& e) {
    throw ExtractionError(stage2, e.what());
  }
  pf.phi_b = pf.barrier_fit.intercept;
  pf.alpha = -pf.barrier_fit.slope;
  return pf;
}

}  // namespace

ExtractionResult extract_thermionic(const IVCurveSet& ivs) {
  if (ivs.curves.size() < 3) throw ExtractionError("input", "fewer than 3 temperatures");
  std::map<double, std::vector<std::pair<double, double>>> by_v;
  for (const auto& curve : ivs.curves) {
    if (!(curve.temperature > 0.0) || !std::isfinite(curve.temperature)) {
      throw ExtractionError("input", "non-positive temperature");
    }
    for (const auto& p : curve.points) {
      if (p.v == 0.0) continue;
      if (!std::isfinite(p.v) || !std::isfinite(p.i)) {
        throw ExtractionError("input", "non-finite sample");
      }
      // Current must flow with the bias.
      if (!(p.i * p.v > 0.0)) {
        throw ExtractionError("input", "non-positive current at v = " + std::to_string(p.v));
      }
      by_v[p.v].emplace_back(curve.temperature, p.i);
    }
  }
  for (const auto& [v, samples] : by_v) {
    if (samples.size() != ivs.curves.size()) {
      throw ExtractionError("input", "voltage " + std::to_string(v) +
                                         " is missing at some temperatures");
    }
  }

  ExtractionResult out;
  double min_r2 = 1.0;
  std::vector<double> intercepts;
  out.positive = fit_polarity(by_v, true, min_r2, intercepts);
  out.negative = fit_polarity(by_v, false, min_r2, intercepts);

  const auto [lo, hi] = std::minmax_element(intercepts.begin(), intercepts.end());
  const double mean_intercept =
      std::accumulate(intercepts.begin(), intercepts.end(), 0.0) / intercepts.size();

  auto& d = out.diagnostics;
  d.stage1_min_r2 = min_r2;
  d.stage2_r2_pos = out.positive.barrier_fit.r2;
  d.stage2_r2_neg = out.negative.barrier_fit.r2;
  d.intercept_spread = *hi - *lo;
  d.phi_b_pos = out.positive.phi_b;
  d.phi_b_neg = out.negative.phi_b;
  const double phi_b = 0.5 * (out.positive.phi_b + out.negative.phi_b);
  d.thermionic_consistent = d.stage1_min_r2 > 0.999 && d.stage2_r2_pos > 0.999 &&
                            d.stage2_r2_neg > 0.999 && d.intercept_spread < 1e-3 &&
                            phi_b >= 0.0 && out.positive.alpha >= 0.0 &&
                            out.negative.alpha >= 0.0;

  // Parameters are reported as fitted; the diagnostics carry any misfit.
  out.params.a_prefactor = std::exp(mean_intercept);
  out.params.phi_b = phi_b;
  out.params.alpha_pos = out.positive.alpha;
  out.params.alpha_neg = out.negative.alpha;
  return out;
}

double sensitivity_percent_per_K(std::span<const SettledPoint> trace) {
  if (trace.size() < 2) throw CalibrationError("sensitivity needs at least two settled points");
  double r300 = 0.0;
  int n300 = 0;
  for (const auto& p : trace) {
    if (std::abs(p.temperature - kReferenceTemperature) < 1e-6) {
      r300 += p.r;
      ++n300;
    }
  }
  if (n300 == 0) throw CalibrationError("sensitivity needs a 300 K baseline point");
  r300 /= n300;
  std::vector<double> x, y;
  for (const auto& p : trace) {
    x.push_back(p.temperature - kReferenceTemperature);
    y.push_back(100.0 * (p.r / r300 - 1.0));
  }
  try {
    return linear_fit(x, y).slope;
  } catch (const std::invalid_argument& e) {
    throw CalibrationError(std::string("sensitivity: ") + e.what());
  }
}

Thermometer::Thermometer(ThermalFit fit, double r_eff, double guard)
    : fit_(std::move(fit)), guard_(guard) {
  if (!(guard >= 0.0)) throw std::invalid_argument("guard must be >= 0");
  state_.r_persistent = r_eff;
  state_.validate();
  band_low_ = read_resistance(state_, fit_, kMaxTemperature);
  band_high_ = read_resistance(state_, fit_, kMinTemperature);
  if (!(band_low_ < band_high_)) throw CalibrationError("thermometer band is empty");
}

ThermometerReading Thermometer::invert(double r_measured) const {
  if (!std::isfinite(r_measured) || r_measured < band_low_ * (1.0 - guard_) ||
      r_measured > band_high_ * (1.0 + guard_)) {
    throw OutOfRangeError("resistance " + std::to_string(r_measured) + " ohm outside band [" +
                              std::to_string(band_low_) + ", " + std::to_string(band_high_) +
                              "] ohm +/- guard",
                          band_low_, band_high_);
  }
  if (r_measured >= band_high_) return {kMinTemperature, r_measured > band_high_};
  if (r_measured <= band_low_) return {kMaxTemperature, r_measured < band_low_};
  // read_resistance is strictly decreasing in T.
  auto f = [&](double t) { return read_resistance(state_, fit_, t) - r_measured; };
  auto tol = [](double a, double b) { return std::abs(b - a) <= 1e-7; };
  const auto [a, b] = boost::math::tools::bisect(f, kMinTemperature, kMaxTemperature, tol);
  return {0.5 * (a + b), false};
}

double invert_temperature(double r_measured, const ThermalFit& fit, double r_eff, double guard) {
  return Thermometer(fit, r_eff, guard).invert(r_measured).temperature;
}

SwitchCurveFit fit_switch_curve(std::span<const NullclinePoint> grid, double saturation) {
  if (!(saturation > 0.0)) throw std::invalid_argument("saturation must be > 0");
  constexpr double kPeak = 1.4;
  constexpr double kVTol = 1e-9;

  std::map<double, std::vector<std::pair<double, double>>> by_t;  // T -> (v, |frac|)
  std::vector<std::pair<double, double>> at_peak;                 // (T, |frac|)
  for (const auto& p : grid) {
    const double f = std::abs(p.fraction) / saturation;
    if (f == 0.0) continue;
    if (p.v <= kPeak + kVTol) by_t[p.temperature].emplace_back(p.v, f);
    if (std::abs(p.v - kPeak) < kVTol && p.temperature >= 310.0 - kVTol &&
        p.temperature <= 360.0 + kVTol) {
      at_peak.emplace_back(p.temperature, f);
    }
  }
  if (at_peak.size() < 2) {
    throw CalibrationError("switch-curve fit needs supra-threshold 1.4 V data at >= 2 "
                           "temperatures in [310, 360] K");
  }

  double beta_sum = 0.0;
  int beta_n = 0;
  for (const auto& [t, samples] : by_t) {
    if (samples.size() < 2) continue;
    std::vector<double> x, y;
    for (const auto& [v, f] : samples) {
      x.push_back(v - kPeak);
      y.push_back(std::log(f));
    }
    try {
      beta_sum += linear_fit(x, y).slope;
      ++beta_n;
    } catch (const std::invalid_argument&) {
      // all samples at one voltage for this temperature
    }
  }
  if (beta_n == 0) {
    throw CalibrationError("switch-curve fit needs >= 2 supra-threshold voltages at one "
                           "temperature");
  }

  std::vector<double> ts, fs;
  for (const auto& [t, f] : at_peak) {
    ts.push_back(t);
    fs.push_back(f);
  }
  LinearFit ramp;
  try {
    ramp = linear_fit(ts, fs);
  } catch (const std::invalid_argument& e) {
    throw CalibrationError(std::string("switch-curve temperature ramp: ") + e.what());
  }
  SwitchCurveFit out;
  out.beta = beta_sum / beta_n;
  out.g_14_310 = ramp.intercept + ramp.slope * 310.0;
  out.g_14_360 = ramp.intercept + ramp.slope * 360.0;
  return out;
}

}  // namespace memthermo

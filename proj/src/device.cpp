#include "memthermo/device.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <stdexcept>
#include <string>

#include <boost/math/tools/roots.hpp>

#include "memthermo/errors.hpp"

namespace memthermo {

namespace {

constexpr double kUpperPhi = 2.0;  // eV; rho(360 K) ~ 2e-6 here
constexpr double kResetBand = 0.01;

void require_finite(double x, const char* what) {
  if (!std::isfinite(x)) throw std::invalid_argument(std::string(what) + " must be finite");
}

void require_temperature_in_range(double temperature) {
  require_finite(temperature, "temperature");
  // Tolerate rounding from plant updates that converge onto a limit.
  constexpr double kSlack = 1e-9;
  if (temperature < kMinTemperature - kSlack || temperature > kMaxTemperature + kSlack) {
    throw std::invalid_argument("temperature " + std::to_string(temperature) +
                                " K outside [300, 360] K");
  }
}

double clamp_resistance(double r) { return std::clamp(r, kResistanceFloor, kResistanceCeiling); }

void clamp_state(DeviceState& s) {
  s.r_persistent = clamp_resistance(s.r_persistent);
  const double r = s.r_eff();
  if (r > kResistanceCeiling) s.r_volatile_excess = kResistanceCeiling - s.r_persistent;
  if (r < kResistanceFloor) s.r_volatile_excess = kResistanceFloor - s.r_persistent;
}

}  // namespace

void ThermionicParams::validate() const {
  require_finite(a_prefactor, "a_prefactor");
  require_finite(phi_b, "phi_b");
  require_finite(alpha_pos, "alpha_pos");
  require_finite(alpha_neg, "alpha_neg");
  if (a_prefactor <= 0.0) throw std::invalid_argument("a_prefactor must be > 0");
  if (phi_b < 0.0) throw std::invalid_argument("phi_b must be >= 0");
  if (alpha_pos < 0.0 || alpha_neg < 0.0) throw std::invalid_argument("alpha must be >= 0");
}

double thermionic_current(double v, double temperature, const ThermionicParams& p) {
  require_finite(v, "voltage");
  require_finite(temperature, "temperature");
  if (temperature <= 0.0) throw std::invalid_argument("temperature must be > 0");
  p.validate();
  const double alpha = v >= 0.0 ? p.alpha_pos : p.alpha_neg;
  const double barrier = p.phi_b - alpha * std::sqrt(std::abs(v));
  const double magnitude =
      p.a_prefactor * temperature * temperature * std::exp(-barrier / (kBoltzmannEv * temperature));
  return std::copysign(magnitude, v);
}

double rho_temperature_factor(double temperature, double phi_app) {
  require_temperature_in_range(temperature);
  require_finite(phi_app, "phi_app");
  if (phi_app <= kPhiMonotonicityBound) {
    throw std::invalid_argument("phi_app at or below the monotonicity bound");
  }
  const double ratio = kReferenceTemperature / temperature;
  return ratio * ratio *
         std::exp(phi_app / kBoltzmannEv * (1.0 / temperature - 1.0 / kReferenceTemperature));
}

double min_achievable_drop() {
  const double ratio = kReferenceTemperature / kMaxTemperature;
  const double rho_at_bound =
      ratio * ratio *
      std::exp(kPhiMonotonicityBound / kBoltzmannEv *
               (1.0 / kMaxTemperature - 1.0 / kReferenceTemperature));
  return 1.0 - rho_at_bound;
}

double barrier_shift_response(double temperature, double phi_app, double dphi) {
  require_finite(dphi, "dphi");
  return rho_temperature_factor(temperature, phi_app) * std::expm1(dphi / (kBoltzmannEv * temperature));
}

double calibrate_phi_from_drop(double total_drop) {
  require_finite(total_drop, "total_drop");
  const double lo_drop = min_achievable_drop();
  if (total_drop <= lo_drop || total_drop >= 1.0) {
    throw CalibrationError("drop " + std::to_string(total_drop) + " outside achievable range (" +
                           std::to_string(lo_drop) +
                           ", 1): barrier must stay above -2 k_B 300 K");
  }
  const double target = 1.0 - total_drop;
  // rho(360) is strictly decreasing in phi.
  auto f = [target](double phi) { return rho_temperature_factor(kMaxTemperature, phi) - target; };
  const double lo = std::nextafter(kPhiMonotonicityBound, 0.0);
  if (f(kUpperPhi) > 0.0) {
    throw CalibrationError("drop " + std::to_string(total_drop) + " needs a barrier above 2 eV");
  }
  auto tol = [](double a, double b) { return std::abs(b - a) <= 1e-15; };
  const auto [a, b] = boost::math::tools::bisect(f, lo, kUpperPhi, tol);
  const double phi = 0.5 * (a + b);
  if (std::abs(f(phi)) > 1e-10) {
    throw CalibrationError("barrier root-find did not reach 1e-10 in rho");
  }
  return phi;
}

ThermalFit::ThermalFit(std::vector<AnchorSpec> anchors) {
  if (anchors.empty()) throw CalibrationError("thermal fit needs at least one anchor");
  for (std::size_t i = 0; i < anchors.size(); ++i) {
    const auto& a = anchors[i];
    if (!(a.r_ref > 0.0) || !std::isfinite(a.r_ref)) {
      throw CalibrationError("anchor '" + a.label + "' has non-positive resistance");
    }
    if (i > 0 && !(a.r_ref < anchors[i - 1].r_ref)) {
      throw CalibrationError("anchors must be strictly decreasing in r_ref at '" + a.label + "'");
    }
    anchors_.push_back({a.label, a.r_ref, a.total_drop, calibrate_phi_from_drop(a.total_drop)});
  }
}

ThermalFit ThermalFit::defaults() {
  // L1-L3 drops place the least-squares sensitivities at ~0.95, ~0.63 and
  // ~0.40 %/K.
  return ThermalFit({{"pristine", 3.0e6, 0.61},
                     {"L1", 1.0e6, 0.58},
                     {"L2", 250.0e3, 0.38},
                     {"L3", 15.0e3, 0.24},
                     {"L4", 8.0e3, 0.11}});
}

double ThermalFit::phi_for_state(double r_eff) const {
  require_finite(r_eff, "r_eff");
  if (r_eff <= 0.0) throw std::invalid_argument("r_eff must be > 0");
  if (r_eff >= anchors_.front().r_ref) return anchors_.front().phi_app;
  if (r_eff <= anchors_.back().r_ref) return anchors_.back().phi_app;
  // anchors_ is decreasing; find the first anchor strictly below r_eff.
  const auto it = std::upper_bound(anchors_.begin(), anchors_.end(), r_eff,
                                   [](double r, const ThermalAnchor& a) { return r > a.r_ref; });
  const auto& lower = *it;
  const auto& upper = *(it - 1);
  if (r_eff == upper.r_ref) return upper.phi_app;
  const double x0 = std::log10(lower.r_ref);
  const double x1 = std::log10(upper.r_ref);
  const double w = (std::log10(r_eff) - x0) / (x1 - x0);
  return lower.phi_app + w * (upper.phi_app - lower.phi_app);
}

void DeviceState::validate() const {
  require_finite(r_persistent, "r_persistent");
  require_finite(r_volatile_excess, "r_volatile_excess");
  if (r_persistent <= 0.0) throw std::invalid_argument("r_persistent must be > 0");
  if (r_eff() <= 0.0) throw std::invalid_argument("effective resistance must be > 0");
}

std::string_view level_name(Level level) {
  switch (level) {
    case Level::pristine: return "pristine";
    case Level::l1: return "L1";
    case Level::l2: return "L2";
    case Level::l3: return "L3";
    case Level::l4: return "L4";
  }
  return "?";
}

Level parse_level(std::string_view name) {
  std::string lower(name);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (lower == "pristine") return Level::pristine;
  if (lower == "l1") return Level::l1;
  if (lower == "l2") return Level::l2;
  if (lower == "l3") return Level::l3;
  if (lower == "l4") return Level::l4;
  throw std::invalid_argument("unknown resistance level '" + std::string(name) + "'");
}

double level_reference_resistance(Level level) {
  switch (level) {
    case Level::pristine: return 3.0e6;
    case Level::l1: return 1.0e6;
    case Level::l2: return 250.0e3;
    case Level::l3: return 15.0e3;
    case Level::l4: return 8.0e3;
  }
  return 1.0e6;
}

DeviceState preset_state(Level level) {
  DeviceState s;
  s.r_persistent = level_reference_resistance(level);
  return s;
}

double read_resistance(const DeviceState& state, const ThermalFit& fit, double temperature) {
  state.validate();
  const double r = state.r_eff();
  return r * rho_temperature_factor(temperature, fit.phi_for_state(r));
}

ThermionicParams iv_params_for_level(Level level, const ThermalFit& fit) {
  const double r_ref = level_reference_resistance(level);
  const double phi_app = fit.phi_for_state(r_ref);
  ThermionicParams p;
  if (level == Level::pristine || level == Level::l1) {
    p.alpha_pos = 0.06;
    p.alpha_neg = 0.03;
  } else {
    p.alpha_pos = 0.1;
    p.alpha_neg = 0.1;
  }
  p.phi_b = phi_app + p.alpha_pos * std::sqrt(kReadVoltage);
  if (p.phi_b < 0.0) throw CalibrationError("level barrier would be negative");
  const double t = kReferenceTemperature;
  p.a_prefactor = (kReadVoltage / r_ref) / (t * t * std::exp(-phi_app / (kBoltzmannEv * t)));
  return p;
}

void SwitchingParams::validate() const {
  for (double x : {v_th, g_14_310, g_14_360, beta, n_tau, eta_nv, tau_ret_s, burn_in_gain,
                   thermal_fade_v, reset_v}) {
    require_finite(x, "switching parameter");
  }
  if (!(eta_nv > 0.0 && eta_nv <= 1.0)) throw std::invalid_argument("eta_nv must be in (0, 1]");
  if (!(v_th >= 0.0 && v_th < 0.7)) throw std::invalid_argument("v_th must be in [0, 0.7) V");
  if (!(g_14_310 > 0.0 && g_14_360 >= g_14_310)) {
    throw std::invalid_argument("need g_14_360 >= g_14_310 > 0");
  }
  if (n_tau <= 0.0 || tau_ret_s <= 0.0 || thermal_fade_v <= 0.0) {
    throw std::invalid_argument("time and voltage scales must be > 0");
  }
  if (burn_in_gain <= 0.0) throw std::invalid_argument("burn_in_gain must be > 0");
  if (reset_v <= v_th) throw std::invalid_argument("reset_v must exceed v_th");
}

double train_switch_fraction(double v, double temperature, const SwitchingParams& params) {
  require_finite(v, "voltage");
  require_finite(temperature, "temperature");
  const double mag = std::abs(v);
  if (mag < params.v_th) return 0.0;
  const double g = params.g_14_310 * std::exp(params.beta * (mag - 1.4));
  const double ramp = std::clamp((temperature - 310.0) / 50.0, 0.0, 1.0);
  const double fade = mag <= 1.4 ? 1.0 : std::exp(-(mag - 1.4) / params.thermal_fade_v);
  const double s = 1.0 + (params.g_14_360 / params.g_14_310 - 1.0) * ramp * fade;
  return std::copysign(g * s, v);
}

double fraction_spread(double v, std::span<const double> temperatures,
                       const SwitchingParams& params) {
  if (temperatures.empty()) throw std::invalid_argument("need at least one temperature");
  double lo = INFINITY, hi = -INFINITY, sum = 0.0;
  for (double t : temperatures) {
    const double f = std::abs(train_switch_fraction(v, t, params));
    lo = std::min(lo, f);
    hi = std::max(hi, f);
    sum += f;
  }
  const double mean = sum / static_cast<double>(temperatures.size());
  return mean > 0.0 ? (hi - lo) / mean : 0.0;
}

TrainResult apply_pulse_train(DeviceState state, const Pulse& pulse, double temperature,
                              const SwitchingParams& params, const ThermalFit& fit) {
  require_finite(pulse.v, "pulse voltage");
  require_finite(pulse.width_s, "pulse width");
  if (pulse.width_s <= 0.0) throw std::invalid_argument("pulse width must be > 0");
  if (pulse.count < 1) throw std::invalid_argument("pulse count must be >= 1");
  state.validate();

  TrainResult out;
  out.trace.reserve(pulse.count);
  const double base = train_switch_fraction(pulse.v, temperature, params);
  if (base == 0.0) {
    const double r = read_resistance(state, fit, temperature);
    out.trace.assign(pulse.count, r);
    out.state = state;
    return out;
  }

  auto& train = state.train;
  const bool continuing = train.active && train.v == pulse.v && train.temperature == temperature;
  if (!continuing) {
    train.active = true;
    train.v = pulse.v;
    train.temperature = temperature;
    train.origin_r = state.r_eff();
    train.fraction = base * (state.pulse_count == 0 ? params.burn_in_gain : 1.0);
    train.pulses = 0;
  }

  for (std::uint64_t k = 0; k < pulse.count; ++k) {
    const double n_prev = static_cast<double>(train.pulses);
    const double n_next = n_prev + 1.0;
    const double delta = train.origin_r * train.fraction *
                         (std::exp(-n_prev / params.n_tau) - std::exp(-n_next / params.n_tau));
    state.r_persistent += params.eta_nv * delta;
    state.r_volatile_excess += (1.0 - params.eta_nv) * delta;
    clamp_state(state);
    ++train.pulses;
    ++state.pulse_count;
    out.trace.push_back(read_resistance(state, fit, temperature));
  }
  out.state = state;
  return out;
}

RetentionResult retention_run(DeviceState state, std::uint64_t n_reads, double dt_s,
                              double temperature, const SwitchingParams& params,
                              const ThermalFit& fit) {
  if (n_reads < 1) throw std::invalid_argument("retention needs at least one read");
  require_finite(dt_s, "dt");
  if (dt_s <= 0.0) throw std::invalid_argument("dt must be > 0");
  state.validate();
  state.train.active = false;
  const double decay = std::exp(-dt_s / params.tau_ret_s);
  RetentionResult out;
  out.trace.reserve(n_reads);
  for (std::uint64_t k = 0; k < n_reads; ++k) {
    state.r_volatile_excess *= decay;
    out.trace.push_back(read_resistance(state, fit, temperature));
  }
  out.state = state;
  return out;
}

ResetResult reset_to_reference(DeviceState state, double target_r, const SwitchingParams& params,
                               const ThermalFit& fit, double temperature) {
  require_finite(target_r, "target resistance");
  if (target_r <= 0.0) throw std::invalid_argument("target resistance must be > 0");
  state.validate();

  ResetResult out;
  auto relax = [&] {
    state.r_volatile_excess = 0.0;
    state.train.active = false;
  };
  auto within_band = [&](double r) { return std::abs(r - target_r) / target_r < kResetBand; };

  // Volatile excess is taken as relaxed before comparing against the target.
  state.r_volatile_excess = 0.0;
  double r = read_resistance(state, fit, temperature);
  if (within_band(r)) {
    out.state = state;
    return out;
  }
  relax();
  const double rho = r / state.r_eff();
  const double target_eff = target_r / rho;
  if (target_eff < kResistanceFloor || target_eff > kResistanceCeiling) {
    throw ResetError("reset target " + std::to_string(target_r) +
                         " ohm lies outside the resistance bounds",
                     r);
  }

  while (!within_band(r)) {
    if (out.pulses_applied >= kResetPulseBudget) {
      throw ResetError("reset did not converge within " + std::to_string(kResetPulseBudget) +
                           " pulses",
                       r);
    }
    // Negative pulses lower the resistance, positive ones raise it.
    const double v = r > target_r ? -params.reset_v : params.reset_v;
    const double f = train_switch_fraction(v, temperature, params);
    if (f == 0.0) throw ResetError("reset amplitude is below the switching threshold", r);

    // Relaxed change after n pulses: eta * r_eff * F * (1 - exp(-n / n_tau)).
    const double r_now = state.r_eff();
    const double wanted = (target_r / rho - r_now) / (params.eta_nv * r_now * f);
    std::uint64_t n;
    if (wanted >= 1.0 || !std::isfinite(wanted)) {
      n = static_cast<std::uint64_t>(std::ceil(5.0 * params.n_tau));
    } else {
      n = static_cast<std::uint64_t>(std::llround(-params.n_tau * std::log1p(-wanted)));
      n = std::max<std::uint64_t>(n, 1);
    }
    n = std::min(n, kResetPulseBudget - out.pulses_applied);

    auto train = apply_pulse_train(state, {v, 100e-6, n}, temperature, params, fit);
    state = train.state;
    out.trace.insert(out.trace.end(), train.trace.begin(), train.trace.end());
    out.pulse_v.insert(out.pulse_v.end(), n, v);
    out.pulses_applied += n;
    ++out.trains_applied;
    relax();
    r = read_resistance(state, fit, temperature);
  }
  out.state = state;
  return out;
}

}  // namespace memthermo

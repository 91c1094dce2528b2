#include "memthermo/experiments.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "memthermo/errors.hpp"
#include "memthermo/rng.hpp"

namespace memthermo {

std::string_view phase_name(Phase phase) {
  switch (phase) {
    case Phase::read: return "read";
    case Phase::program: return "program";
    case Phase::retention: return "retention";
    case Phase::reset: return "reset";
  }
  return "read";
}

Phase parse_phase(std::string_view name) {
  if (name == "read") return Phase::read;
  if (name == "program") return Phase::program;
  if (name == "retention") return Phase::retention;
  if (name == "reset") return Phase::reset;
  throw std::invalid_argument("unknown phase '" + std::string(name) + "'");
}

namespace {

ThermalPlant initial_plant(const ExperimentConfig& config) {
  ThermalPlant plant = config.plant;
  plant.t_set = plant.t_air = plant.t_dev = kReferenceTemperature;
  plant.validate();
  return plant;
}

TraceRecord make_record(double t, const ThermalPlant& plant, double r, Phase phase,
                        std::optional<std::uint64_t> pulse = std::nullopt,
                        double v = kReadVoltage) {
  return {t, plant.t_set, plant.t_air, plant.t_dev, r, phase, pulse, v};
}

void check_cadence(const ExperimentConfig& config) {
  if (!(config.read_cadence_s > 0.0)) throw std::invalid_argument("read cadence must be > 0");
}

}  // namespace

CyclingResult run_thermal_cycling(const DeviceState& device, const TemperatureSchedule& schedule,
                                  std::uint64_t seed, const ExperimentConfig& config) {
  schedule.validate();
  device.validate();
  check_cadence(config);

  CyclingResult out;
  DeviceState state = device;
  ThermalPlant plant = initial_plant(config);
  Rng drift_rng(seed, "drift");
  double t = 0.0;
  out.trace.push_back(make_record(t, plant, read_resistance(state, config.fit, plant.t_dev),
                                  Phase::read));

  for (std::size_t h = 0; h < schedule.entries.size(); ++h) {
    const auto& entry = schedule.entries[h];
    plant.set_setpoint(entry.setpoint);
    const auto reads = static_cast<std::uint64_t>(std::llround(entry.hold_s / config.read_cadence_s));
    if (reads < 1) throw std::invalid_argument("hold shorter than one read interval");
    double drift_per_read = 0.0;
    if (config.drift.enabled) {
      const double inc =
          -config.drift.mean_per_hold + config.drift.sigma_per_hold * drift_rng.normal();
      drift_per_read = inc / static_cast<double>(reads);
    }

    std::vector<ResistanceSample> history{{t, out.trace.back().r}};
    history.reserve(reads + 1);
    for (std::uint64_t k = 0; k < reads; ++k) {
      plant = plant_step(plant, config.read_cadence_s);
      t += config.read_cadence_s;
      if (drift_per_read != 0.0) state.r_persistent *= std::exp(drift_per_read);
      const double r = read_resistance(state, config.fit, plant.t_dev);
      out.trace.push_back(make_record(t, plant, r, Phase::read));
      history.push_back({t, r});
    }

    HoldSummary summary;
    summary.setpoint = entry.setpoint;
    summary.r_end = history.back().r;
    summary.r_steady = read_resistance(state, config.fit, entry.setpoint);
    summary.settled = settled(history) == SettleStatus::settled;
    if (!summary.settled) {
      throw ProtocolError("hold " + std::to_string(h) + " at " + std::to_string(entry.setpoint) +
                          " K not settled after " + std::to_string(entry.hold_s) +
                          " s (t_dev " + std::to_string(plant.t_dev) + " K, r " +
                          std::to_string(summary.r_end) + " ohm)");
    }
    out.holds.push_back(summary);
  }
  out.final_state = state;
  return out;
}

double revisit_discrepancy(std::span<const HoldSummary> holds, double setpoint) {
  const HoldSummary* first = nullptr;
  const HoldSummary* last = nullptr;
  for (const auto& h : holds) {
    if (h.setpoint != setpoint) continue;
    if (!first) first = &h;
    last = &h;
  }
  if (!first || first == last) return 0.0;
  return std::abs(last->r_steady - first->r_steady) / first->r_steady;
}

std::vector<SettledPoint> settled_points(std::span<const HoldSummary> holds) {
  std::vector<SettledPoint> out;
  out.reserve(holds.size());
  for (const auto& h : holds) out.push_back({h.setpoint, h.r_end});
  return out;
}

double total_drop(std::span<const HoldSummary> holds) {
  const HoldSummary* cold = nullptr;
  const HoldSummary* hot = nullptr;
  for (const auto& h : holds) {
    if (!cold && h.setpoint == kMinTemperature) cold = &h;
    if (!hot && h.setpoint == kMaxTemperature) hot = &h;
  }
  if (!cold || !hot) return 0.0;
  return 1.0 - hot->r_end / cold->r_end;
}

std::vector<LevelResult> run_level_sweep(std::span<const Level> levels,
                                         const TemperatureSchedule& schedule, std::uint64_t seed,
                                         const ExperimentConfig& config) {
  std::vector<LevelResult> out;
  for (Level level : levels) {
    LevelResult lr;
    lr.level = level;
    lr.cycling = run_thermal_cycling(preset_state(level), schedule, seed, config);
    lr.drop = total_drop(lr.cycling.holds);
    const auto points = settled_points(lr.cycling.holds);
    bool any_hot = false;
    for (const auto& p : points) any_hot = any_hot || p.temperature != kReferenceTemperature;
    lr.sensitivity = any_hot ? sensitivity_percent_per_K(points) : 0.0;
    out.push_back(std::move(lr));
  }
  return out;
}

HsrResult run_heat_stimulate_retention(const DeviceState& device, double t_test, double v_prog,
                                       std::uint64_t seed, const ExperimentConfig& config) {
  (void)seed;  // the protocol itself draws no randomness
  device.validate();
  check_cadence(config);
  if (!std::isfinite(t_test) || t_test < kMinTemperature || t_test > kMaxTemperature) {
    throw std::invalid_argument("test temperature outside [300, 360] K");
  }
  if (config.program_pulses < 1 || config.retention_reads < 1) {
    throw std::invalid_argument("protocol needs at least one pulse and one retention read");
  }
  const auto& fit = config.fit;
  const auto& sw = config.switching;

  HsrResult out;
  std::vector<TraceRecord> trace;
  DeviceState state = device;
  ThermalPlant plant = initial_plant(config);
  double t = 0.0;

  out.reference_r = read_resistance(state, fit, plant.t_dev);
  trace.push_back(make_record(t, plant, out.reference_r, Phase::read));

  const double cadence_decay = std::exp(-config.read_cadence_s / sw.tau_ret_s);
  auto hold = [&](double setpoint) {
    plant.set_setpoint(setpoint);
    const auto reads =
        static_cast<std::uint64_t>(std::llround(config.stabilise_s / config.read_cadence_s));
    for (std::uint64_t k = 0; k < reads; ++k) {
      plant = plant_step(plant, config.read_cadence_s);
      t += config.read_cadence_s;
      state.r_volatile_excess *= cadence_decay;
      trace.push_back(make_record(t, plant, read_resistance(state, fit, plant.t_dev), Phase::read));
    }
  };

  hold(t_test);

  // The train lasts ~2 s, negligible against the plant; it runs at the device
  // temperature reached after stabilisation.
  const double t_prog = plant.t_dev;
  out.pre_train_r = read_resistance(state, fit, t_prog);
  const double r_eff_before = state.r_eff();
  const auto train = apply_pulse_train(
      state, {v_prog, config.pulse_width_s, config.program_pulses}, t_prog, sw, fit);
  state = train.state;
  for (std::uint64_t k = 0; k < train.trace.size(); ++k) {
    t += config.pulse_period_s;
    trace.push_back(make_record(t, plant, train.trace[k], Phase::program, k + 1, v_prog));
  }
  plant = plant_step(plant, config.pulse_period_s * static_cast<double>(train.trace.size()));
  const double r_eff_trained = state.r_eff();
  out.final_fraction = r_eff_trained / r_eff_before - 1.0;
  out.final_fraction_at_test = train.trace.back() / out.pre_train_r - 1.0;

  for (std::uint64_t k = 0; k < config.retention_reads; ++k) {
    plant = plant_step(plant, config.retention_dt_s);
    t += config.retention_dt_s;
    const auto ret = retention_run(state, 1, config.retention_dt_s, plant.t_dev, sw, fit);
    state = ret.state;
    trace.push_back(make_record(t, plant, ret.trace.front(), Phase::retention, k + 1));
  }
  const double induced = r_eff_trained - r_eff_before;
  out.retention_recovered = induced != 0.0 ? (r_eff_trained - state.r_eff()) / induced : 0.0;

  hold(kReferenceTemperature);

  // Reset targets the 300 K-referenced state recorded at the start.
  const auto reset = reset_to_reference(state, out.reference_r, sw, fit, kReferenceTemperature);
  state = reset.state;
  out.reset_pulses = reset.pulses_applied;
  for (std::size_t k = 0; k < reset.trace.size(); ++k) {
    t += config.pulse_period_s;
    trace.push_back(make_record(t, plant, reset.trace[k], Phase::reset, k + 1, reset.pulse_v[k]));
  }
  t += config.read_cadence_s;
  plant = plant_step(plant, config.read_cadence_s);
  trace.push_back(make_record(t, plant, read_resistance(state, fit, plant.t_dev), Phase::read));

  out.trace.reserve(trace.size());
  for (auto& rec : trace) {
    const double r = rec.r;
    out.trace.push_back({std::move(rec), r / out.pre_train_r - 1.0, r / out.reference_r - 1.0});
  }
  out.final_state = state;
  return out;
}

std::vector<double> default_nullcline_voltages() {
  std::vector<double> v;
  for (int k = 7; k <= 14; ++k) v.push_back(k / 10.0);
  return v;
}

std::vector<double> default_nullcline_temperatures() {
  return {310.0, 320.0, 330.0, 340.0, 350.0, 360.0};
}

NullclineSweep run_nullcline_sweep(const DeviceState& device, std::span<const double> voltages,
                                   std::span<const double> temperatures, std::uint64_t seed,
                                   const ExperimentConfig& config) {
  if (voltages.empty() || temperatures.empty()) {
    throw std::invalid_argument("nullcline sweep needs voltages and temperatures");
  }
  NullclineSweep out;
  DeviceState state = device;
  for (double v : voltages) {
    for (double temp : temperatures) {
      const auto run = run_heat_stimulate_retention(state, temp, v, seed, config);
      out.grid.push_back({v, temp, run.final_fraction});
      state = run.final_state;
    }
  }
  out.final_state = state;
  return out;
}

IVCurveSet run_iv_sweep(const ThermionicParams& params, std::span<const double> temperatures,
                        double v_max, int steps, const SwitchingParams& switching) {
  if (!(v_max > 0.0) || !std::isfinite(v_max)) throw std::invalid_argument("v_max must be > 0");
  if (v_max >= switching.v_th) {
    throw std::invalid_argument("IV sweep up to " + std::to_string(v_max) +
                                " V would cross the switching threshold");
  }
  if (steps < 1) throw std::invalid_argument("IV sweep needs at least one step");
  if (temperatures.empty()) throw std::invalid_argument("IV sweep needs temperatures");
  IVCurveSet out;
  for (double temp : temperatures) {
    IVCurve curve;
    curve.temperature = temp;
    for (int k = -steps; k <= steps; ++k) {
      if (k == 0) continue;
      const double v = v_max * k / steps;
      curve.points.push_back({v, thermionic_current(v, temp, params)});
    }
    out.curves.push_back(std::move(curve));
  }
  return out;
}

IVCurveSet run_iv_sweep(Level level, std::span<const double> temperatures, double v_max, int steps,
                        const ExperimentConfig& config) {
  return run_iv_sweep(iv_params_for_level(level, config.fit), temperatures, v_max, steps,
                      config.switching);
}

}  // namespace memthermo

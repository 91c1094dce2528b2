#include "memthermo/thermal.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "memthermo/constants.hpp"
#include "memthermo/rng.hpp"

namespace memthermo {

ThermalPlant ThermalPlant::packaged(double t_initial) {
  ThermalPlant p;
  p.set_setpoint(t_initial);
  p.t_air = p.t_dev = t_initial;
  return p;
}

ThermalPlant ThermalPlant::on_wafer(double t_initial) {
  ThermalPlant p = packaged(t_initial);
  p.tau_dev = 60.0;
  return p;
}

ThermalPlant ThermalPlant::preset(std::string_view name, double t_initial) {
  if (name == "packaged") return packaged(t_initial);
  if (name == "on-wafer" || name == "on_wafer") return on_wafer(t_initial);
  throw std::invalid_argument("unknown plant preset '" + std::string(name) + "'");
}

void ThermalPlant::set_setpoint(double t) {
  if (!std::isfinite(t) || t < kMinTemperature || t > kMaxTemperature) {
    throw std::invalid_argument("setpoint " + std::to_string(t) + " K outside [300, 360] K");
  }
  t_set = t;
}

void ThermalPlant::validate() const {
  if (!(tau_air > 0.0) || !(tau_dev > 0.0)) {
    throw std::invalid_argument("plant time constants must be > 0");
  }
  if (!std::isfinite(t_air) || !std::isfinite(t_dev)) {
    throw std::invalid_argument("plant temperatures must be finite");
  }
  if (t_set < kMinTemperature || t_set > kMaxTemperature) {
    throw std::invalid_argument("setpoint outside [300, 360] K");
  }
}

ThermalPlant plant_step(ThermalPlant plant, double dt_s) {
  if (!(dt_s > 0.0)) throw std::invalid_argument("plant step needs dt > 0");
  // Closed-form solution of the cascade for a constant setpoint over dt.
  const double ta = plant.tau_air, td = plant.tau_dev;
  const double a0 = plant.t_air - plant.t_set;
  const double d0 = plant.t_dev - plant.t_set;
  const double ea = std::exp(-dt_s / ta), ed = std::exp(-dt_s / td);
  double coupling;
  if (std::abs(ta - td) > 1e-9 * std::max(ta, td)) {
    coupling = ta / (ta - td) * (ea - ed);
  } else {
    coupling = dt_s / td * ed;
  }
  plant.t_air = plant.t_set + a0 * ea;
  plant.t_dev = plant.t_set + d0 * ed + a0 * coupling;
  return plant;
}

SettleStatus settled(std::span<const ResistanceSample> history, double window_s, double fraction) {
  if (history.size() < 2) return SettleStatus::insufficient_history;
  const auto& first = history.front();
  const auto& last = history.back();
  constexpr double kTimeSlack = 1e-9;
  if (last.t - first.t < window_s - kTimeSlack) return SettleStatus::insufficient_history;

  const double cutoff = last.t - window_s + kTimeSlack;
  // Latest sample at or before the start of the trailing window.
  auto it = std::upper_bound(history.begin(), history.end(), cutoff,
                             [](double t, const ResistanceSample& s) { return t < s.t; });
  const auto& window_start = *(it - 1);

  const double trailing = std::abs(last.r - window_start.r);
  const double total = std::abs(last.r - first.r);
  if (trailing == 0.0) return SettleStatus::settled;
  return trailing < fraction * total ? SettleStatus::settled : SettleStatus::not_settled;
}

void TemperatureSchedule::validate() const {
  if (entries.empty()) throw std::invalid_argument("schedule has no entries");
  for (const auto& e : entries) {
    const double steps = (e.setpoint - kMinTemperature) / 10.0;
    if (e.setpoint < kMinTemperature || e.setpoint > kMaxTemperature ||
        std::abs(steps - std::round(steps)) > 1e-9) {
      throw std::invalid_argument("setpoint " + std::to_string(e.setpoint) +
                                  " K is not a multiple of 10 K in [300, 360] K");
    }
    if (!(e.hold_s > 0.0) || !std::isfinite(e.hold_s)) {
      throw std::invalid_argument("hold time must be > 0");
    }
  }
}

std::vector<double> default_schedule_temperatures() {
  return {300.0, 310.0, 320.0, 330.0, 340.0, 350.0, 360.0};
}

TemperatureSchedule scrambled_schedule(std::uint64_t seed, std::span<const double> temps,
                                       double hold_s) {
  std::vector<double> order = temps.empty() ? default_schedule_temperatures()
                                            : std::vector<double>(temps.begin(), temps.end());
  Rng rng(seed, "schedule");
  for (std::size_t i = order.size(); i > 1; --i) {
    std::swap(order[i - 1], order[rng.below(i)]);
  }
  const bool has_hot = std::find(order.begin(), order.end(), kMaxTemperature) != order.end();
  const bool has_ref = std::find(order.begin(), order.end(), kReferenceTemperature) != order.end();
  // Keep the appended 360 K visit distinct from the permutation's last entry.
  if (has_hot && order.size() > 1 && order.back() == kMaxTemperature) {
    std::swap(order[order.size() - 1], order[order.size() - 2]);
  }
  if (has_hot) order.push_back(kMaxTemperature);
  if (has_ref) order.push_back(kReferenceTemperature);

  TemperatureSchedule schedule;
  schedule.seed = seed;
  for (double t : order) schedule.entries.push_back({t, hold_s});
  schedule.validate();
  return schedule;
}

}  // namespace memthermo

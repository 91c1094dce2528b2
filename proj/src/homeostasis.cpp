#include "memthermo/homeostasis.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

#include "memthermo/errors.hpp"
#include "memthermo/rng.hpp"

namespace memthermo {

std::string_view weight_mode_name(WeightMode mode) {
  return mode == WeightMode::resistance ? "resistance" : "conductance";
}

WeightMode parse_weight_mode(std::string_view name) {
  if (name == "resistance") return WeightMode::resistance;
  if (name == "conductance") return WeightMode::conductance;
  throw std::invalid_argument("unknown weight mode '" + std::string(name) + "'");
}

double synapse_weight(double r_now, double r_ref, WeightMode mode) {
  if (!(r_ref > 0.0)) throw std::invalid_argument("reference resistance must be > 0");
  return mode == WeightMode::resistance ? r_now / r_ref : r_ref / r_now;
}

FeedforwardMap FeedforwardMap::affine(double kappa, double onset) {
  FeedforwardMap m;
  m.mode = Mode::affine;
  m.kappa = kappa;
  m.onset = onset;
  m.validate();
  return m;
}

FeedforwardMap FeedforwardMap::calibrated(std::vector<std::pair<double, double>> table) {
  FeedforwardMap m;
  m.mode = Mode::calibrated;
  m.table = std::move(table);
  m.validate();
  return m;
}

void FeedforwardMap::validate() const {
  if (mode == Mode::affine) {
    if (!(kappa >= 0.0) || !std::isfinite(kappa)) {
      throw std::invalid_argument("feedforward gain must be finite and >= 0");
    }
    if (!std::isfinite(onset)) throw std::invalid_argument("feedforward onset must be finite");
    return;
  }
  if (table.empty()) throw std::invalid_argument("calibrated feedforward table is empty");
  for (std::size_t i = 0; i < table.size(); ++i) {
    const auto [load, temp] = table[i];
    if (!std::isfinite(load) || !std::isfinite(temp) || temp < kMinTemperature ||
        temp > kMaxTemperature) {
      throw std::invalid_argument("feedforward table entry outside [300, 360] K");
    }
    if (i > 0 && (!(load > table[i - 1].first) || temp < table[i - 1].second)) {
      throw std::invalid_argument("feedforward table must be increasing in load and monotone");
    }
  }
}

double feedforward_setpoint(double load, const FeedforwardMap& map) {
  if (!std::isfinite(load)) throw std::invalid_argument("load must be finite");
  if (map.mode == FeedforwardMap::Mode::affine) {
    return std::clamp(kMinTemperature + map.kappa * (load - map.onset), kMinTemperature,
                      kMaxTemperature);
  }
  const auto& tab = map.table;
  if (load <= tab.front().first) return tab.front().second;
  if (load >= tab.back().first) return tab.back().second;
  const auto it = std::upper_bound(tab.begin(), tab.end(), load,
                                   [](double l, const auto& e) { return l < e.first; });
  const auto& [l1, t1] = *it;
  const auto& [l0, t0] = *(it - 1);
  return t0 + (t1 - t0) * (load - l0) / (l1 - l0);
}

NeuronSystem::NeuronSystem(const NeuronConfig& config, std::uint64_t seed, const ThermalFit& fit)
    : fit_(fit),
      plant_(config.plant),
      map_(config.map),
      weight_mode_(config.weight_mode),
      theta_(config.theta),
      dt_(config.dt_s),
      window_(config.window) {
  if (!(theta_ > 0.0)) throw std::invalid_argument("theta must be > 0");
  if (!(dt_ > 0.0)) throw std::invalid_argument("dt must be > 0");
  if (window_ < 1) throw std::invalid_argument("rate window must be >= 1 step");
  if (!(config.spread_sigma >= 0.0)) throw std::invalid_argument("spread sigma must be >= 0");
  map_.validate();
  plant_.t_set = plant_.t_air = plant_.t_dev = kReferenceTemperature;
  plant_.validate();

  Rng spread(seed, "device_spread");
  for (std::size_t i = 0; i < kSynapseCount; ++i) {
    synapses_[i] = preset_state(config.level);
    if (config.spread_sigma > 0.0) {
      synapses_[i].r_persistent *= std::exp(config.spread_sigma * spread.normal());
    }
    r_ref_[i] = read_resistance(synapses_[i], fit_, kReferenceTemperature);
  }
}

const std::array<double, kSynapseCount>& NeuronSystem::weights() const {
  if (plant_.t_dev != cached_t_dev_) {
    for (std::size_t i = 0; i < kSynapseCount; ++i) {
      cached_weights_[i] =
          synapse_weight(read_resistance(synapses_[i], fit_, plant_.t_dev), r_ref_[i], weight_mode_);
    }
    cached_t_dev_ = plant_.t_dev;
  }
  return cached_weights_;
}

double NeuronSystem::weight(std::size_t i) const { return weights().at(i); }

double NeuronSystem::drive(const InputVector& x) const {
  const auto& w = weights();
  return std::inner_product(w.begin(), w.end(), x.begin(), 0.0);
}

StepResult NeuronSystem::step(const InputVector& x) {
  accumulator_ += drive(x);
  StepResult r;
  if (accumulator_ >= theta_) {
    const double n = std::floor(accumulator_ / theta_);
    accumulator_ -= n * theta_;
    // floor can land one short when the quotient rounds just below an integer.
    if (accumulator_ >= theta_) {
      accumulator_ -= theta_;
      r.spikes = static_cast<int>(n) + 1;
    } else {
      r.spikes = static_cast<int>(n);
    }
    r.spiked = true;
  }
  plant_.set_setpoint(feedforward_setpoint(mean_load(x), map_));
  plant_ = plant_step(plant_, dt_);
  return r;
}

void NeuronSystem::settle_at(double load) {
  const double t = feedforward_setpoint(load, map_);
  plant_.t_set = plant_.t_air = plant_.t_dev = t;
}

void NeuronSystem::set_map(FeedforwardMap map) {
  map.validate();
  map_ = std::move(map);
}

InputVector uniform_input(double load) {
  if (!(load >= 0.0 && load <= 1.0)) throw std::invalid_argument("load must be in [0, 1]");
  InputVector x;
  x.fill(load);
  return x;
}

double mean_load(const InputVector& x) {
  return std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(kSynapseCount);
}

double measure_rate(NeuronSystem& system, double load, std::size_t steps) {
  if (steps < 1) throw std::invalid_argument("rate measurement needs at least one step");
  const auto x = uniform_input(load);
  const double acc0 = system.accumulator();
  std::uint64_t spikes = 0;
  for (std::size_t k = 0; k < steps; ++k) spikes += system.step(x).spikes;
  const double carried = (system.accumulator() - acc0) / system.theta();
  return (static_cast<double>(spikes) + carried) / static_cast<double>(steps);
}

double settled_rate(const NeuronSystem& system_template, double load, std::size_t steps) {
  NeuronSystem system = system_template;
  system.settle_at(load);
  return measure_rate(system, load, steps);
}

namespace {

FeedforwardMap table_for_affine(double kappa, double onset) {
  std::vector<std::pair<double, double>> table;
  auto add = [&](double load) {
    if (!table.empty() && !(load > table.back().first)) return;
    table.emplace_back(load,
                       std::clamp(kMinTemperature + kappa * (load - onset), kMinTemperature,
                                  kMaxTemperature));
  };
  add(0.0);
  if (onset > 0.0 && onset < 1.0) add(onset);
  if (kappa > 0.0) {
    const double saturation = onset + (kMaxTemperature - kMinTemperature) / kappa;
    if (saturation > 0.0 && saturation < 1.0) add(saturation);
  }
  add(1.0);
  return FeedforwardMap::calibrated(std::move(table));
}

}  // namespace

GainCalibration calibrate_gain(std::span<const double> loads, const NeuronSystem& system_template,
                               const GainSearch& search) {
  if (loads.empty()) throw CalibrationError("gain calibration needs at least one load");
  if (!(search.kappa_step > 0.0) || !(search.kappa_max >= 0.0) || !(search.onset_step > 0.0)) {
    throw std::invalid_argument("gain search grid must have positive steps");
  }
  std::vector<double> sorted(loads.begin(), loads.end());
  std::sort(sorted.begin(), sorted.end());
  for (double l : sorted) uniform_input(l);  // range check

  std::vector<double> onsets{0.0};
  if (search.search_onset) {
    const auto n = static_cast<int>(std::floor(sorted.front() / search.onset_step + 1e-9));
    for (int k = 1; k <= n; ++k) onsets.push_back(k * search.onset_step);
  }
  const auto n_kappa = static_cast<int>(std::floor(search.kappa_max / search.kappa_step + 1e-9));

  bool found = false;
  GainCalibration best;
  NeuronSystem probe = system_template;
  std::vector<double> rates(sorted.size());
  for (int ik = 0; ik <= n_kappa; ++ik) {
    const double kappa = ik * search.kappa_step;
    for (double onset : onsets) {
      probe.set_map(FeedforwardMap::affine(kappa, onset));
      for (std::size_t i = 0; i < sorted.size(); ++i) {
        rates[i] = settled_rate(probe, sorted[i], search.measure_steps);
      }
      bool increasing = true;
      for (std::size_t i = 1; i < rates.size(); ++i) increasing = increasing && rates[i] > rates[i - 1];
      if (!increasing) continue;
      const double mean = std::accumulate(rates.begin(), rates.end(), 0.0) / rates.size();
      double var = 0.0;
      for (double r : rates) var += (r - mean) * (r - mean);
      var /= static_cast<double>(rates.size());
      if (!found || var < best.variance) {
        found = true;
        best.kappa = kappa;
        best.onset = onset;
        best.variance = var;
        best.rates = rates;
      }
    }
  }
  if (!found) {
    throw CalibrationError("no feedforward gain keeps settled rates increasing in load");
  }
  best.loads = sorted;
  best.map = table_for_affine(best.kappa, best.onset);
  return best;
}

void InputPattern::validate() const {
  if (segments.empty()) throw std::invalid_argument("input pattern has no segments");
  for (const auto& s : segments) {
    if (s.duration < 1) throw std::invalid_argument("segment duration must be >= 1 step");
    if (!(s.load >= 0.0 && s.load <= 1.0)) throw std::invalid_argument("load must be in [0, 1]");
  }
}

std::uint64_t InputPattern::total_steps() const {
  std::uint64_t n = 0;
  for (const auto& s : segments) n += s.duration;
  return n;
}

HomeostasisResult run_homeostasis(const InputPattern& pattern, NeuronSystem system,
                                  const HomeostasisOptions& options) {
  pattern.validate();
  if (options.presettle) system.settle_at(pattern.segments.front().load);

  HomeostasisResult out;
  const std::size_t window = system.window();
  const double dt = system.dt();
  out.t_dev.reserve(pattern.total_steps());

  std::uint64_t step = 0;
  std::uint64_t window_spikes = 0;
  double window_load = 0.0;
  std::uint64_t group_spikes = 0;
  std::uint64_t group_start = 0;
  for (const auto& seg : pattern.segments) {
    const auto x = uniform_input(seg.load);
    for (std::uint64_t k = 0; k < seg.duration; ++k, ++step) {
      const auto r = system.step(x);
      out.t_dev.push_back(system.plant().t_dev);
      window_load += seg.load;
      for (int s = 0; s < r.spikes; ++s) {
        out.spike_steps.push_back(step);
        ++window_spikes;
        if (++group_spikes == kSynapseCount) {
          const std::uint64_t span = step + 1 - group_start;
          out.spike_groups.push_back({out.spike_groups.size(), (step + 1) * dt,
                                      static_cast<double>(kSynapseCount) / span});
          group_spikes = 0;
          group_start = step + 1;
        }
      }
      if ((step + 1) % window == 0) {
        WindowRate w;
        w.index = out.windows.size();
        w.t_start = static_cast<double>(step + 1 - window) * dt;
        w.load = window_load / window;
        w.rate = static_cast<double>(window_spikes) / window;
        w.t_set = system.plant().t_set;
        w.t_dev = system.plant().t_dev;
        out.windows.push_back(w);
        window_spikes = 0;
        window_load = 0.0;
      }
    }
  }
  return out;
}

std::vector<std::pair<double, double>> baseline_curve(std::span<const double> loads,
                                                      const NeuronSystem& system,
                                                      std::size_t measure_steps) {
  std::vector<std::pair<double, double>> out;
  out.reserve(loads.size());
  for (double load : loads) out.emplace_back(load, settled_rate(system, load, measure_steps));
  return out;
}

}  // namespace memthermo

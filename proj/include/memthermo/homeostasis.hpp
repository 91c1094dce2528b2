#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

#include "memthermo/device.hpp"
#include "memthermo/thermal.hpp"

namespace memthermo {

inline constexpr std::size_t kSynapseCount = 25;

using InputVector = std::array<double, kSynapseCount>;

enum class WeightMode {
  resistance,   // w = R / R_ref: heating lowers the weight
  conductance,  // w = R_ref / R, kept for comparison
};

std::string_view weight_mode_name(WeightMode mode);
WeightMode parse_weight_mode(std::string_view name);

double synapse_weight(double r_now, double r_ref, WeightMode mode = WeightMode::resistance);

// Input load -> chamber setpoint. Affine: clamp(300 + kappa (load - onset)).
// Calibrated: piecewise-linear table, clamped at its ends.
struct FeedforwardMap {
  enum class Mode { affine, calibrated };

  Mode mode = Mode::affine;
  double kappa = 0.0;  // K per unit load
  double onset = 0.0;  // load at which heating starts
  std::vector<std::pair<double, double>> table;  // (load, setpoint), load ascending

  static FeedforwardMap affine(double kappa, double onset = 0.0);
  static FeedforwardMap calibrated(std::vector<std::pair<double, double>> table);

  // Throws std::invalid_argument when the map is not monotone non-decreasing.
  void validate() const;
};

double feedforward_setpoint(double load, const FeedforwardMap& map);

struct NeuronConfig {
  Level level = Level::pristine;
  double theta = 12.5;  // rate 0.5 spikes/step at load 0.25, 300 K
  double dt_s = 1.0;
  std::size_t window = 25;
  WeightMode weight_mode = WeightMode::resistance;
  double spread_sigma = 0.0;  // log-normal device-to-device spread of r_ref
  ThermalPlant plant = ThermalPlant::packaged();
  FeedforwardMap map;
};

struct StepResult {
  bool spiked = false;
  int spikes = 0;  // more than one only when the drive exceeds theta
};

// 25 synapses sharing one thermal plant, feeding an accumulate-and-fire
// neuron that carries the excess over theta across a spike.
class NeuronSystem {
 public:
  NeuronSystem(const NeuronConfig& config, std::uint64_t seed,
               const ThermalFit& fit = ThermalFit::defaults());

  // Accumulates sum(w_i x_i) at the current device temperature, fires, then
  // advances the plant one dt towards the setpoint for mean(x).
  StepResult step(const InputVector& x);

  double weight(std::size_t i) const;
  double drive(const InputVector& x) const;
  const std::array<double, kSynapseCount>& weights() const;

  // Places the plant at its fixed point for `load`.
  void settle_at(double load);

  const ThermalPlant& plant() const { return plant_; }
  ThermalPlant& plant() { return plant_; }
  const FeedforwardMap& map() const { return map_; }
  void set_map(FeedforwardMap map);
  double accumulator() const { return accumulator_; }
  double theta() const { return theta_; }
  double dt() const { return dt_; }
  std::size_t window() const { return window_; }
  std::span<const DeviceState> synapses() const { return synapses_; }
  std::span<const double> reference_resistances() const { return r_ref_; }

 private:
  std::array<DeviceState, kSynapseCount> synapses_;
  std::array<double, kSynapseCount> r_ref_{};
  ThermalFit fit_;
  ThermalPlant plant_;
  FeedforwardMap map_;
  WeightMode weight_mode_;
  double accumulator_ = 0.0;
  mutable double cached_t_dev_ = -1.0;
  mutable std::array<double, kSynapseCount> cached_weights_{};
  double theta_;
  double dt_;
  std::size_t window_;
};

InputVector uniform_input(double load);
double mean_load(const InputVector& x);

// Long-run spikes per step over `steps`, from spike count plus the change in
// accumulator, i.e. the mean drive over theta.
double measure_rate(NeuronSystem& system, double load, std::size_t steps);

// Rate at load with the plant held at the map's fixed point.
double settled_rate(const NeuronSystem& system_template, double load, std::size_t steps = 250);

struct GainSearch {
  double kappa_max = 400.0;
  double kappa_step = 1.0;
  double onset_step = 0.01;  // onsets 0, step, ... up to the smallest load
  bool search_onset = true;
  std::size_t measure_steps = 250;
};

struct GainCalibration {
  double kappa = 0.0;
  double onset = 0.0;
  double variance = 0.0;
  std::vector<double> loads;
  std::vector<double> rates;
  FeedforwardMap map;  // calibrated-mode table equivalent to (kappa, onset)
};

// Grid search for the affine map minimising the variance of settled rates
// across loads, restricted to maps that keep the rates strictly increasing in
// load. Ties go to the smaller kappa, then the smaller onset. Throws
// CalibrationError when no candidate is feasible.
GainCalibration calibrate_gain(std::span<const double> loads, const NeuronSystem& system_template,
                               const GainSearch& search = {});

struct InputSegment {
  std::uint64_t duration = 1;  // steps
  double load = 0.0;
};

struct InputPattern {
  std::vector<InputSegment> segments;
  void validate() const;
  std::uint64_t total_steps() const;
};

struct WindowRate {
  std::uint64_t index = 0;
  double t_start = 0.0;  // s
  double load = 0.0;     // mean load over the window
  double rate = 0.0;     // spikes per step
  double t_set = 300.0;  // at window end
  double t_dev = 300.0;
};

struct SpikeGroupRate {
  std::uint64_t index = 0;
  double t_end = 0.0;  // s, time of the group's last spike
  double rate = 0.0;   // 25 / steps taken
};

struct HomeostasisResult {
  std::vector<WindowRate> windows;
  std::vector<SpikeGroupRate> spike_groups;
  std::vector<std::uint64_t> spike_steps;
  std::vector<double> t_dev;  // per step
};

struct HomeostasisOptions {
  bool presettle = true;  // start the plant at the fixed point of the first load
};

// Randomness (device spread) is fixed when the system is constructed, so the
// runners take no seed of their own.
HomeostasisResult run_homeostasis(const InputPattern& pattern, NeuronSystem system,
                                  const HomeostasisOptions& options = {});

// (load, settled rate) with the system's own feedforward map.
std::vector<std::pair<double, double>> baseline_curve(std::span<const double> loads,
                                                      const NeuronSystem& system,
                                                      std::size_t measure_steps = 1000);

}  // namespace memthermo

#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "memthermo/calibration.hpp"
#include "memthermo/device.hpp"
#include "memthermo/thermal.hpp"

namespace memthermo {

enum class Phase { read, program, retention, reset };

std::string_view phase_name(Phase phase);
Phase parse_phase(std::string_view name);

struct TraceRecord {
  double t = 0.0;  // s
  double t_set = 300.0;
  double t_air = 300.0;
  double t_dev = 300.0;
  double r = 0.0;  // ohm, read at 0.2 V
  Phase phase = Phase::read;
  std::optional<std::uint64_t> pulse_index;
  double v_applied = kReadVoltage;

  bool operator==(const TraceRecord&) const = default;
};

// Slow multiplicative drift of the persistent state. Each hold draws a
// log-increment N(-mean_per_hold, sigma_per_hold) that is spread evenly over
// the hold's reads.
struct DriftModel {
  bool enabled = false;
  double mean_per_hold = 0.004;
  double sigma_per_hold = 0.002;
};

struct ExperimentConfig {
  ThermalFit fit = ThermalFit::defaults();
  SwitchingParams switching;
  ThermalPlant plant = ThermalPlant::packaged();  // time constants only
  double read_cadence_s = 6.0;
  DriftModel drift;

  // Heat-stimulate-retention protocol.
  double stabilise_s = 3600.0;
  std::uint64_t program_pulses = 200;
  double pulse_width_s = 100e-6;
  double pulse_period_s = 0.01;
  std::uint64_t retention_reads = 200;
  double retention_dt_s = 1.0;
};

// ---------------------------------------------------------------------------
// Thermal cycling
// ---------------------------------------------------------------------------

struct HoldSummary {
  double setpoint = 300.0;
  double r_end = 0.0;     // last read of the hold
  double r_steady = 0.0;  // the state at hold end read at the setpoint
  bool settled = false;
};

struct CyclingResult {
  std::vector<TraceRecord> trace;
  std::vector<HoldSummary> holds;
  DeviceState final_state;
};

// Holds every schedule entry, stepping the plant and reading at the read
// cadence. Throws ProtocolError when a hold ends unsettled.
CyclingResult run_thermal_cycling(const DeviceState& device, const TemperatureSchedule& schedule,
                                  std::uint64_t seed, const ExperimentConfig& config = {});

// Relative difference of steady-state resistance between the first and the
// last visit to `setpoint`; 0 with fewer than two visits.
double revisit_discrepancy(std::span<const HoldSummary> holds, double setpoint);

// Settled (T, R) pairs from hold-end reads.
std::vector<SettledPoint> settled_points(std::span<const HoldSummary> holds);

// 1 - R(360)/R(300) from the first hold-end reads at each temperature; 0 when
// either temperature was never visited.
double total_drop(std::span<const HoldSummary> holds);

struct LevelResult {
  Level level = Level::pristine;
  CyclingResult cycling;
  double drop = 0.0;
  double sensitivity = 0.0;  // %/K, signed
};

std::vector<LevelResult> run_level_sweep(std::span<const Level> levels,
                                         const TemperatureSchedule& schedule, std::uint64_t seed,
                                         const ExperimentConfig& config = {});

// ---------------------------------------------------------------------------
// Heat-stimulate-retention
// ---------------------------------------------------------------------------

struct HsrRecord {
  TraceRecord record;
  double frac_at_test = 0.0;  // vs the pre-train read at the test temperature
  double frac_ref = 0.0;      // vs the 300 K reference read
};

struct HsrResult {
  std::vector<HsrRecord> trace;
  double reference_r = 0.0;      // 300 K read before heating
  double pre_train_r = 0.0;      // read at T_test just before the train
  double final_fraction = 0.0;   // r_eff change over the train, 300 K-referenced
  double final_fraction_at_test = 0.0;
  double retention_recovered = 0.0;  // share of the induced r_eff change undone
  std::uint64_t reset_pulses = 0;
  DeviceState final_state;
};

HsrResult run_heat_stimulate_retention(const DeviceState& device, double t_test, double v_prog,
                                       std::uint64_t seed, const ExperimentConfig& config = {});

struct NullclineSweep {
  std::vector<NullclinePoint> grid;
  DeviceState final_state;
};

std::vector<double> default_nullcline_voltages();     // 0.7 ... 1.4 V
std::vector<double> default_nullcline_temperatures();  // 310 ... 360 K

// One protocol run per (v, T) cell on the same device, reset between runs.
NullclineSweep run_nullcline_sweep(const DeviceState& device, std::span<const double> voltages,
                                   std::span<const double> temperatures, std::uint64_t seed,
                                   const ExperimentConfig& config = {});

// ---------------------------------------------------------------------------
// IV sweeps
// ---------------------------------------------------------------------------

// `steps` voltages per polarity, v_max * k / steps for k = 1..steps.
// Throws std::invalid_argument when v_max reaches the switching threshold.
IVCurveSet run_iv_sweep(const ThermionicParams& params, std::span<const double> temperatures,
                        double v_max, int steps, const SwitchingParams& switching = {});

IVCurveSet run_iv_sweep(Level level, std::span<const double> temperatures, double v_max, int steps,
                        const ExperimentConfig& config = {});

}  // namespace memthermo

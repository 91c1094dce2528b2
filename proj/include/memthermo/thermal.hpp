#pragma once

#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

namespace memthermo {

// Chamber air and device as two cascaded first-order stages.
struct ThermalPlant {
  double t_set = 300.0;  // K
  double t_air = 300.0;
  double t_dev = 300.0;
  double tau_air = 180.0;  // s
  double tau_dev = 720.0;  // s; 60 s for devices measured on wafer

  static ThermalPlant packaged(double t_initial = 300.0);
  static ThermalPlant on_wafer(double t_initial = 300.0);
  static ThermalPlant preset(std::string_view name, double t_initial = 300.0);

  // Throws std::invalid_argument outside the chamber limits.
  void set_setpoint(double t);
  void validate() const;
};

// Exact exponential update of both stages; stable for any dt > 0.
ThermalPlant plant_step(ThermalPlant plant, double dt_s);

struct ResistanceSample {
  double t = 0.0;  // s
  double r = 0.0;  // ohm
};

enum class SettleStatus { settled, not_settled, insufficient_history };

inline constexpr double kSettleWindowS = 360.0;
inline constexpr double kSettleFraction = 0.02;

// History starts at the setpoint change. Settled when the change over the
// trailing window is below 2 % of the total change since the step. A
// perfectly flat history counts as settled.
SettleStatus settled(std::span<const ResistanceSample> history,
                     double window_s = kSettleWindowS, double fraction = kSettleFraction);

struct ScheduleEntry {
  double setpoint = 300.0;  // K
  double hold_s = 3600.0;

  bool operator==(const ScheduleEntry&) const = default;
};

struct TemperatureSchedule {
  std::vector<ScheduleEntry> entries;
  std::uint64_t seed = 0;

  // Setpoints must be multiples of 10 K inside [300, 360]; holds > 0.
  void validate() const;
  bool operator==(const TemperatureSchedule&) const = default;
};

inline constexpr double kDefaultHoldS = 3600.0;

// Seeded permutation of temps followed by second visits to 360 K and 300 K,
// so a cycle ends back at the reference temperature.
TemperatureSchedule scrambled_schedule(std::uint64_t seed,
                                       std::span<const double> temps = {},
                                       double hold_s = kDefaultHoldS);

std::vector<double> default_schedule_temperatures();

}  // namespace memthermo

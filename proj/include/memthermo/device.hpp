#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "memthermo/constants.hpp"

namespace memthermo {

// ---------------------------------------------------------------------------
// Conduction
// ---------------------------------------------------------------------------

// Thermionic emission over an interfacial barrier with field lowering.
// alpha is selected by the polarity of the applied voltage.
struct ThermionicParams {
  double a_prefactor = 1.0e-6;  // A/K^2, Richardson constant x effective area
  double phi_b = 0.3;           // eV, zero-field barrier
  double alpha_pos = 0.0;       // eV/sqrt(V)
  double alpha_neg = 0.0;

  void validate() const;
};

// I(v, T) = A T^2 exp(-(phi_b - alpha sqrt|v|) / kT), signed like v.
double thermionic_current(double v, double temperature, const ThermionicParams& p);

// R(T)/R(300 K) for an apparent barrier phi_app:
//   (T_ref/T)^2 exp((phi_app/k)(1/T - 1/T_ref))
double rho_temperature_factor(double temperature, double phi_app);

// Change of R(T) when the barrier shifts by dphi with the prefactor held
// fixed, in units of the unshifted R(300 K).
double barrier_shift_response(double temperature, double phi_app, double dphi);

// Unique phi_app with rho(360 K) = 1 - total_drop. Throws CalibrationError
// when the drop is outside what a monotone rho can produce.
double calibrate_phi_from_drop(double total_drop);

// Smallest 300->360 K drop a barrier strictly above the monotonicity bound
// can produce (exclusive); drops must lie in (min_achievable_drop(), 1).
double min_achievable_drop();

// ---------------------------------------------------------------------------
// Thermal fit: resistance level -> apparent barrier
// ---------------------------------------------------------------------------

struct AnchorSpec {
  std::string label;
  double r_ref = 0.0;       // ohm at 300 K
  double total_drop = 0.0;  // fractional decrease over 300 -> 360 K
};

struct ThermalAnchor {
  std::string label;
  double r_ref = 0.0;
  double total_drop = 0.0;
  double phi_app = 0.0;  // eV, signed
};

class ThermalFit {
 public:
  // Anchors must be strictly decreasing in r_ref.
  explicit ThermalFit(std::vector<AnchorSpec> anchors);

  // pristine 3 MOhm / 61 %, L1 1 MOhm, L2 250 kOhm, L3 15 kOhm, L4 8 kOhm / 11 %.
  static ThermalFit defaults();

  // Linear in log10(r) between anchors, clamped to the end anchors.
  double phi_for_state(double r_eff) const;

  std::span<const ThermalAnchor> anchors() const { return anchors_; }
  double t_ref() const { return kReferenceTemperature; }

 private:
  std::vector<ThermalAnchor> anchors_;  // decreasing r_ref
};

// ---------------------------------------------------------------------------
// Device state and resistance levels
// ---------------------------------------------------------------------------

// Bookkeeping for a pulse train that can be continued by a later call with
// the same amplitude and temperature.
struct TrainProgress {
  bool active = false;
  double v = 0.0;
  double temperature = 0.0;
  double origin_r = 0.0;     // r_eff when the train started
  double fraction = 0.0;     // asymptotic fraction F (burn-in applied)
  std::uint64_t pulses = 0;  // pulses delivered so far in this train

  bool operator==(const TrainProgress&) const = default;
};

struct DeviceState {
  double r_persistent = 1.0e6;     // ohm at 300 K, volatile part relaxed
  double r_volatile_excess = 0.0;  // ohm, signed, decays during retention
  std::uint64_t pulse_count = 0;   // supra-threshold pulses received
  TrainProgress train;

  double r_eff() const { return r_persistent + r_volatile_excess; }
  void validate() const;

  bool operator==(const DeviceState&) const = default;
};

enum class Level { pristine, l1, l2, l3, l4 };

inline constexpr Level kAllLevels[] = {Level::pristine, Level::l1, Level::l2, Level::l3,
                                       Level::l4};

std::string_view level_name(Level level);
Level parse_level(std::string_view name);  // throws std::invalid_argument
double level_reference_resistance(Level level);
DeviceState preset_state(Level level);

// R at the read voltage: r_eff * rho(T, phi_for_state(r_eff)). Pure.
double read_resistance(const DeviceState& state, const ThermalFit& fit, double temperature);

// Conduction parameters consistent with the thermal fit: at 0.2 V and 300 K
// the IV model gives the level's r_ref, and its temperature dependence at
// 0.2 V reproduces rho for the level's apparent barrier. Pristine and L1
// carry asymmetric barrier lowering.
ThermionicParams iv_params_for_level(Level level, const ThermalFit& fit);

// ---------------------------------------------------------------------------
// Switching
// ---------------------------------------------------------------------------

struct SwitchingParams {
  double v_th = 0.5;        // V, hard gate
  double g_14_310 = 0.22;   // train fraction at 1.4 V, 310 K
  double g_14_360 = 0.27;   // train fraction at 1.4 V, 360 K
  double beta = 3.425564675426244;  // 1/V, ln(0.22/0.02)/0.7 so G(0.7 V) = 0.02
  double n_tau = 20.0;      // pulses
  double eta_nv = 0.4;      // non-volatile share of an induced change
  double tau_ret_s = 50.0;  // s, 50 retention read intervals of 1 s
  double burn_in_gain = 1.0;
  // Above 1.4 V the temperature ramp of the train fraction fades as
  // exp(-(|v| - 1.4)/thermal_fade_v).
  double thermal_fade_v = 0.1;
  double reset_v = 1.2;  // V, magnitude used by reset_to_reference

  void validate() const;
};

// Asymptotic signed fraction of a saturating train: 0 below v_th, else
// sign(v) G(|v|) s(T, |v|).
double train_switch_fraction(double v, double temperature, const SwitchingParams& params);

// Relative spread (max - min)/mean of |train_switch_fraction| over temperatures.
double fraction_spread(double v, std::span<const double> temperatures,
                       const SwitchingParams& params);

struct Pulse {
  double v = 0.0;
  double width_s = 100e-6;
  std::uint64_t count = 1;
};

struct TrainResult {
  DeviceState state;
  std::vector<double> trace;  // read_resistance at T after every pulse
};

TrainResult apply_pulse_train(DeviceState state, const Pulse& pulse, double temperature,
                              const SwitchingParams& params, const ThermalFit& fit);

struct RetentionResult {
  DeviceState state;
  std::vector<double> trace;
};

// Volatile excess decays by exp(-dt/tau_ret) per read; ends any open train.
RetentionResult retention_run(DeviceState state, std::uint64_t n_reads, double dt_s,
                              double temperature, const SwitchingParams& params,
                              const ThermalFit& fit);

struct ResetResult {
  DeviceState state;
  std::uint64_t pulses_applied = 0;
  std::uint64_t trains_applied = 0;
  std::vector<double> trace;      // read after every pulse
  std::vector<double> pulse_v;    // amplitude of every pulse
};

inline constexpr std::uint64_t kResetPulseBudget = 10'000;

// Drives the relaxed state back to within 1 % of target_r (read at
// temperature). Uses negative trains to lower resistance and positive ones
// to raise it. Throws ResetError on an unreachable target or budget overrun.
ResetResult reset_to_reference(DeviceState state, double target_r,
                               const SwitchingParams& params, const ThermalFit& fit,
                               double temperature = kReferenceTemperature);

}  // namespace memthermo

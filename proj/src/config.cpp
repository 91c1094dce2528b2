#include "memthermo/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <system_error>

#include "memthermo/csv.hpp"
#include "memthermo/errors.hpp"

extern char** environ;

namespace memthermo {

namespace {

constexpr ConfigKey kKeys[] = {
    {"meta.version", "0.1.0", "version that wrote the manifest (informational)"},
    {"run.experiment", "", "subcommand; set by the CLI"},
    {"run.seed", "1", "root seed for all random sub-streams"},
    {"run.out", "out", "output directory"},

    {"device.level", "pristine", "device preset: pristine | l1 | l2 | l3 | l4"},
    {"device.levels", "pristine,l1,l2,l3,l4", "levels swept by `levels`"},

    {"plant.preset", "packaged", "packaged | on-wafer"},
    {"plant.tau_air_s", "180", "chamber air time constant; defaults from the preset"},
    {"plant.tau_dev_s", "720", "device time constant; 60 for on-wafer"},

    {"switching.v_th", "0.5", "hard switching threshold, V"},
    {"switching.g_14_310", "0.22", "train fraction at 1.4 V and 310 K"},
    {"switching.g_14_360", "0.27", "train fraction at 1.4 V and 360 K"},
    {"switching.beta", "3.425564675426244", "voltage scale of the train fraction, 1/V"},
    {"switching.n_tau", "20", "train saturation scale, pulses"},
    {"switching.eta_nv", "0.4", "non-volatile share of an induced change"},
    {"switching.tau_ret_s", "50", "volatile relaxation time, s"},
    {"switching.burn_in_gain", "1", "extra gain of a device's first train"},
    {"switching.thermal_fade_v", "0.1", "fade of the temperature ramp above 1.4 V, V"},
    {"switching.reset_v", "1.2", "reset pulse amplitude, V"},

    {"cycle.read_cadence_s", "6", "read interval during holds, s"},
    {"cycle.hold_s", "3600", "hold per setpoint, s"},
    {"cycle.temperatures", "300,310,320,330,340,350,360", "setpoints to permute"},
    {"drift.enabled", "false", "slow persistent drift during holds"},
    {"drift.mean_per_hold", "0.004", "mean log-decrease per hold"},
    {"drift.sigma_per_hold", "0.002", "sd of the log-decrease per hold"},

    {"hsr.t_test_K", "360", "test temperature"},
    {"hsr.v_prog_V", "1.5", "programming amplitude"},
    {"hsr.stabilise_s", "3600", "stabilisation at each temperature, s"},
    {"hsr.program_pulses", "200", "pulses in the programming train"},
    {"hsr.pulse_width_s", "0.0001", "pulse width, s"},
    {"hsr.pulse_period_s", "0.01", "pulse period, s"},
    {"hsr.retention_reads", "200", "reads after the train"},
    {"hsr.retention_dt_s", "1", "retention read interval, s"},

    {"nullcline.voltages", "0.7,0.8,0.9,1,1.1,1.2,1.3,1.4", "amplitudes, V"},
    {"nullcline.temperatures", "310,320,330,340,350,360", "test temperatures, K"},

    {"iv.temperatures", "300,330,360", "sweep temperatures, K"},
    {"iv.v_max_V", "0.45", "largest |v|; must stay below switching.v_th"},
    {"iv.steps", "8", "voltages per polarity"},

    {"signature.iv_csv", "", "IV CSV (T_K, v_V, i_A) to fit; empty: synthesise from iv.*"},

    {"thermometer.temperatures", "300,310,320,330,340,350,360", "true temperatures, K"},
    {"thermometer.noise", "0.01", "relative log-normal read noise"},
    {"thermometer.trials", "100", "noisy trials, spread over the temperatures"},
    {"thermometer.guard", "0.02", "relative guard band beyond the 300-360 K range"},

    {"neuron.level", "pristine", "level of all 25 synapses"},
    {"neuron.theta", "12.5", "firing threshold"},
    {"neuron.dt_s", "1", "step length, s"},
    {"neuron.window", "25", "steps per rate window"},
    {"neuron.weight_mode", "resistance", "resistance | conductance"},
    {"neuron.spread_sigma", "0", "log-normal spread of synapse r_ref"},

    {"map.mode", "auto", "affine | calibrated | auto (calibrate_gain at run time)"},
    {"map.kappa", "0", "affine gain, K per unit load"},
    {"map.onset", "0", "affine onset load"},
    {"map.table", "", "calibrated table load:K,load:K,..."},

    {"calibrate.loads", "0.15,0.2,0.25,0.3,0.35,0.4", "loads for the gain search"},
    {"calibrate.kappa_max", "400", "largest gain searched"},
    {"calibrate.kappa_step", "1", "gain grid step"},
    {"calibrate.onset_step", "0.01", "onset grid step"},
    {"calibrate.search_onset", "true", "search the onset as well as the gain"},
    {"calibrate.measure_steps", "250", "steps per settled-rate measurement"},

    {"baseline.loads", "0,0.05,0.1,0.15,0.2,0.25,0.3,0.35,0.4,0.45,0.5,0.6", "loads"},
    {"baseline.measure_steps", "1000", "steps per settled-rate measurement"},

    {"homeostasis.segments", "4000:0.2,5000:0.3,5000:0.2", "steps:load,..."},
    {"homeostasis.pattern_csv", "", "pattern CSV (step, load); overrides segments"},
    {"homeostasis.presettle", "true", "start at the fixed point of the first load"},
};

const ConfigKey* find_key(std::string_view key) {
  for (const auto& k : kKeys) {
    if (k.key == key) return &k;
  }
  return nullptr;
}

std::string trim(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> out;
  if (trim(s).empty()) return out;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    out.push_back(trim(s.substr(start, pos == std::string_view::npos ? pos : pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

[[noreturn]] void bad_value(std::string_view key, std::string_view value, std::string_view why) {
  throw ConfigError("invalid value '" + std::string(value) + "' for " + std::string(key) + ": " +
                    std::string(why));
}

double to_double(std::string_view key, std::string_view s) {
  try {
    const double x = csv::parse_double(s);
    if (!std::isfinite(x)) bad_value(key, s, "not finite");
    return x;
  } catch (const std::invalid_argument&) {
    bad_value(key, s, "expected a number");
  }
}

}  // namespace

std::span<const ConfigKey> config_keys() { return kKeys; }

std::string env_name(std::string_view key) {
  std::string out = "MEMTHERMO_";
  for (char c : key) {
    out += c == '.' ? '_' : static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  }
  return out;
}

RunConfig::RunConfig() {
  for (const auto& k : kKeys) values_.emplace(std::string(k.key), std::string(k.default_value));
}

void RunConfig::set(std::string_view key, std::string_view value) {
  if (!find_key(key)) throw ConfigError("unknown config key '" + std::string(key) + "'");
  values_[std::string(key)] = trim(value);
  explicit_.insert(std::string(key));
}

void RunConfig::merge_text(std::string_view text, std::string_view origin) {
  std::size_t line_no = 0;
  for (const auto& raw : split(text, '\n')) {
    ++line_no;
    std::string line = raw;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(std::string(origin) + ":" + std::to_string(line_no) +
                        ": expected 'key = value'");
    }
    set(trim(std::string_view(line).substr(0, eq)), std::string_view(line).substr(eq + 1));
  }
}

void RunConfig::merge_file(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot read config '" + path.string() + "'");
  std::stringstream ss;
  ss << f.rdbuf();
  merge_text(ss.str(), path.string());
}

void RunConfig::merge_environment(char** envp) {
  if (!envp) envp = environ;
  if (!envp) return;
  for (char** e = envp; *e; ++e) {
    const std::string_view entry(*e);
    if (!entry.starts_with("MEMTHERMO_")) continue;
    const auto eq = entry.find('=');
    const auto name = entry.substr(0, eq);
    const auto value = eq == std::string_view::npos ? std::string_view{} : entry.substr(eq + 1);
    const ConfigKey* match = nullptr;
    for (const auto& k : kKeys) {
      if (env_name(k.key) == name) match = &k;
    }
    if (!match) throw ConfigError("unknown config key in environment '" + std::string(name) + "'");
    set(match->key, value);
  }
}

void RunConfig::resolve() {
  const auto preset = ThermalPlant::preset(get("plant.preset"));
  auto fill = [this](std::string_view key, double value) {
    if (!is_explicit(key)) values_[std::string(key)] = csv::format_double(value);
  };
  fill("plant.tau_air_s", preset.tau_air);
  fill("plant.tau_dev_s", preset.tau_dev);
}

const std::string& RunConfig::get(std::string_view key) const {
  const auto it = values_.find(key);
  if (it == values_.end()) throw ConfigError("unknown config key '" + std::string(key) + "'");
  return it->second;
}

double RunConfig::get_double(std::string_view key) const { return to_double(key, get(key)); }

std::uint64_t RunConfig::get_u64(std::string_view key) const {
  const auto& s = get(key);
  try {
    return csv::parse_u64(s);
  } catch (const std::invalid_argument&) {
    bad_value(key, s, "expected an unsigned integer");
  }
}

bool RunConfig::get_bool(std::string_view key) const {
  const auto& s = get(key);
  if (s == "true" || s == "1" || s == "on" || s == "yes") return true;
  if (s == "false" || s == "0" || s == "off" || s == "no") return false;
  bad_value(key, s, "expected true or false");
}

std::vector<double> RunConfig::get_doubles(std::string_view key) const {
  std::vector<double> out;
  for (const auto& item : split(get(key), ',')) out.push_back(to_double(key, item));
  return out;
}

std::vector<std::string> RunConfig::get_strings(std::string_view key) const {
  return split(get(key), ',');
}

std::string RunConfig::manifest() const {
  std::string out;
  for (const auto& [k, v] : values_) {
    out += k;
    out += " = ";
    out += v;
    out += '\n';
  }
  return out;
}

namespace {

template <class F>
auto checked(std::string_view what, F&& f) {
  try {
    return f();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string(what) + ": " + e.what());
  }
}

}  // namespace

SwitchingParams RunConfig::switching() const {
  SwitchingParams p;
  p.v_th = get_double("switching.v_th");
  p.g_14_310 = get_double("switching.g_14_310");
  p.g_14_360 = get_double("switching.g_14_360");
  p.beta = get_double("switching.beta");
  p.n_tau = get_double("switching.n_tau");
  p.eta_nv = get_double("switching.eta_nv");
  p.tau_ret_s = get_double("switching.tau_ret_s");
  p.burn_in_gain = get_double("switching.burn_in_gain");
  p.thermal_fade_v = get_double("switching.thermal_fade_v");
  p.reset_v = get_double("switching.reset_v");
  checked("switching", [&] { p.validate(); return 0; });
  return p;
}

ThermalPlant RunConfig::plant() const {
  return checked("plant", [&] {
    ThermalPlant p = ThermalPlant::preset(get("plant.preset"));
    p.tau_air = get_double("plant.tau_air_s");
    p.tau_dev = get_double("plant.tau_dev_s");
    p.validate();
    return p;
  });
}

ExperimentConfig RunConfig::experiment() const {
  ExperimentConfig c;
  c.switching = switching();
  c.plant = plant();
  c.read_cadence_s = get_double("cycle.read_cadence_s");
  if (!(c.read_cadence_s > 0.0)) bad_value("cycle.read_cadence_s", get("cycle.read_cadence_s"), "must be > 0");
  c.drift.enabled = get_bool("drift.enabled");
  c.drift.mean_per_hold = get_double("drift.mean_per_hold");
  c.drift.sigma_per_hold = get_double("drift.sigma_per_hold");
  if (c.drift.sigma_per_hold < 0.0) {
    bad_value("drift.sigma_per_hold", get("drift.sigma_per_hold"), "must be >= 0");
  }
  c.stabilise_s = get_double("hsr.stabilise_s");
  c.program_pulses = get_u64("hsr.program_pulses");
  c.pulse_width_s = get_double("hsr.pulse_width_s");
  c.pulse_period_s = get_double("hsr.pulse_period_s");
  c.retention_reads = get_u64("hsr.retention_reads");
  c.retention_dt_s = get_double("hsr.retention_dt_s");
  if (!(c.stabilise_s >= 0.0)) bad_value("hsr.stabilise_s", get("hsr.stabilise_s"), "must be >= 0");
  if (!(c.pulse_period_s > 0.0)) bad_value("hsr.pulse_period_s", get("hsr.pulse_period_s"), "must be > 0");
  if (!(c.retention_dt_s > 0.0)) bad_value("hsr.retention_dt_s", get("hsr.retention_dt_s"), "must be > 0");
  return c;
}

TemperatureSchedule RunConfig::schedule() const {
  const auto temps = get_doubles("cycle.temperatures");
  const double hold = get_double("cycle.hold_s");
  return checked("cycle", [&] {
    auto s = scrambled_schedule(seed(), temps, hold);
    s.validate();
    return s;
  });
}

NeuronConfig RunConfig::neuron() const {
  NeuronConfig c;
  c.level = checked("neuron.level", [&] { return parse_level(get("neuron.level")); });
  c.theta = get_double("neuron.theta");
  if (!(c.theta > 0.0)) bad_value("neuron.theta", get("neuron.theta"), "must be > 0");
  c.dt_s = get_double("neuron.dt_s");
  if (!(c.dt_s > 0.0)) bad_value("neuron.dt_s", get("neuron.dt_s"), "must be > 0");
  c.window = get_u64("neuron.window");
  if (c.window < 1) bad_value("neuron.window", get("neuron.window"), "must be >= 1");
  c.weight_mode =
      checked("neuron.weight_mode", [&] { return parse_weight_mode(get("neuron.weight_mode")); });
  c.spread_sigma = get_double("neuron.spread_sigma");
  if (c.spread_sigma < 0.0) bad_value("neuron.spread_sigma", get("neuron.spread_sigma"), "must be >= 0");
  c.plant = plant();

  const auto& mode = get("map.mode");
  if (mode == "affine" || mode == "auto") {
    // auto: placeholder until the CLI calibrates
    c.map = checked("map", [&] {
      return mode == "auto" ? FeedforwardMap::affine(0.0)
                            : FeedforwardMap::affine(get_double("map.kappa"), get_double("map.onset"));
    });
  } else if (mode == "calibrated") {
    std::vector<std::pair<double, double>> table;
    for (const auto& item : get_strings("map.table")) {
      const auto colon = item.find(':');
      if (colon == std::string::npos) bad_value("map.table", item, "expected load:K");
      table.emplace_back(to_double("map.table", item.substr(0, colon)),
                         to_double("map.table", item.substr(colon + 1)));
    }
    c.map = checked("map.table", [&] { return FeedforwardMap::calibrated(std::move(table)); });
  } else {
    bad_value("map.mode", mode, "expected affine, calibrated or auto");
  }
  return c;
}

GainSearch RunConfig::gain_search() const {
  GainSearch g;
  g.kappa_max = get_double("calibrate.kappa_max");
  g.kappa_step = get_double("calibrate.kappa_step");
  g.onset_step = get_double("calibrate.onset_step");
  g.search_onset = get_bool("calibrate.search_onset");
  g.measure_steps = get_u64("calibrate.measure_steps");
  if (!(g.kappa_max >= 0.0)) bad_value("calibrate.kappa_max", get("calibrate.kappa_max"), "must be >= 0");
  if (!(g.kappa_step > 0.0)) bad_value("calibrate.kappa_step", get("calibrate.kappa_step"), "must be > 0");
  if (!(g.onset_step > 0.0)) bad_value("calibrate.onset_step", get("calibrate.onset_step"), "must be > 0");
  if (g.measure_steps < 1) bad_value("calibrate.measure_steps", get("calibrate.measure_steps"), "must be >= 1");
  return g;
}

InputPattern RunConfig::pattern() const {
  const auto& path = get("homeostasis.pattern_csv");
  if (!path.empty()) {
    const auto table = csv::read(path);
    return checked("homeostasis.pattern_csv", [&] { return csv::parse_pattern(table); });
  }
  InputPattern p;
  for (const auto& item : get_strings("homeostasis.segments")) {
    const auto colon = item.find(':');
    if (colon == std::string::npos) bad_value("homeostasis.segments", item, "expected steps:load");
    InputSegment seg;
    try {
      seg.duration = csv::parse_u64(item.substr(0, colon));
    } catch (const std::invalid_argument&) {
      bad_value("homeostasis.segments", item, "expected integer steps");
    }
    seg.load = to_double("homeostasis.segments", item.substr(colon + 1));
    p.segments.push_back(seg);
  }
  checked("homeostasis.segments", [&] { p.validate(); return 0; });
  return p;
}

}  // namespace memthermo

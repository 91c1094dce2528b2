#include "memthermo/cli.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "memthermo/config.hpp"
#include "memthermo/csv.hpp"
#include "memthermo/errors.hpp"
#include "memthermo/rng.hpp"

namespace memthermo {

namespace fs = std::filesystem;

namespace {

struct Run {
  const RunConfig& config;
  fs::path out;
  std::ostream& log;

  void emit(const csv::Table& table, const std::string& name) const {
    csv::write(table, out / name);
    log << (out / name).string() << '\n';
  }
};

DeviceState device_state(const RunConfig& c) {
  try {
    return preset_state(parse_level(c.get("device.level")));
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("device.level: ") + e.what());
  }
}

Level device_level(const RunConfig& c) {
  try {
    return parse_level(c.get("device.level"));
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("device.level: ") + e.what());
  }
}

void run_cycle(const Run& run) {
  const auto result = run_thermal_cycling(device_state(run.config), run.config.schedule(),
                                          run.config.seed(), run.config.experiment());
  run.emit(csv::trace_table(result.trace), "trace.csv");
  run.emit(csv::hold_table(result.holds), "holds.csv");
}

void run_levels(const Run& run) {
  std::vector<Level> levels;
  for (const auto& name : run.config.get_strings("device.levels")) {
    try {
      levels.push_back(parse_level(name));
    } catch (const std::invalid_argument& e) {
      throw ConfigError(std::string("device.levels: ") + e.what());
    }
  }
  if (levels.empty()) throw ConfigError("device.levels: no levels given");
  const auto result =
      run_level_sweep(levels, run.config.schedule(), run.config.seed(), run.config.experiment());
  run.emit(csv::level_trace_table(result), "levels_trace.csv");
  run.emit(csv::level_summary_table(result), "levels.csv");
}

IVCurveSet synthetic_iv(const RunConfig& c) {
  const auto steps = c.get_u64("iv.steps");
  if (steps < 1 || steps > 1000) throw ConfigError("iv.steps: must be in [1, 1000]");
  const auto temps = c.get_doubles("iv.temperatures");
  try {
    return run_iv_sweep(device_level(c), temps, c.get_double("iv.v_max_V"),
                        static_cast<int>(steps), c.experiment());
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("iv: ") + e.what());
  }
}

void run_iv(const Run& run) { run.emit(csv::iv_table(synthetic_iv(run.config)), "iv.csv"); }

void run_signature(const Run& run) {
  const auto& path = run.config.get("signature.iv_csv");
  IVCurveSet ivs;
  if (path.empty()) {
    ivs = synthetic_iv(run.config);
  } else {
    const auto table = csv::read(path);
    try {
      ivs = csv::parse_iv(table);
    } catch (const std::invalid_argument& e) {
      throw IoError("'" + path + "': " + e.what());
    }
  }
  run.emit(csv::iv_table(ivs), "iv.csv");
  run.emit(csv::signature_table(signature_points(ivs)), "signature.csv");
  run.emit(csv::extraction_table(extract_thermionic(ivs)), "extraction.csv");
}

void run_hsr(const Run& run) {
  const auto result = run_heat_stimulate_retention(
      device_state(run.config), run.config.get_double("hsr.t_test_K"),
      run.config.get_double("hsr.v_prog_V"), run.config.seed(), run.config.experiment());
  run.emit(csv::hsr_table(result.trace), "hsr.csv");
  run.emit({{"reference_r_ohm", "pre_train_r_ohm", "final_fraction", "final_fraction_at_test",
             "retention_recovered", "reset_pulses"},
            {{csv::format_double(result.reference_r), csv::format_double(result.pre_train_r),
              csv::format_double(result.final_fraction),
              csv::format_double(result.final_fraction_at_test),
              csv::format_double(result.retention_recovered),
              std::to_string(result.reset_pulses)}}},
           "hsr_summary.csv");
}

void run_nullcline(const Run& run) {
  const auto config = run.config.experiment();
  const auto sweep = run_nullcline_sweep(
      device_state(run.config), run.config.get_doubles("nullcline.voltages"),
      run.config.get_doubles("nullcline.temperatures"), run.config.seed(), config);
  run.emit(csv::nullcline_table(sweep.grid), "nullcline.csv");
  const double saturation =
      -std::expm1(-static_cast<double>(config.program_pulses) / config.switching.n_tau);
  const auto fit = fit_switch_curve(sweep.grid, saturation);
  run.emit({{"g_14_310", "g_14_360", "beta_per_V"},
            {{csv::format_double(fit.g_14_310), csv::format_double(fit.g_14_360),
              csv::format_double(fit.beta)}}},
           "switch_fit.csv");
}

void run_thermometer(const Run& run) {
  const auto& c = run.config;
  const auto fit = ThermalFit::defaults();
  const auto state = device_state(c);
  const auto temps = c.get_doubles("thermometer.temperatures");
  const double sigma = c.get_double("thermometer.noise");
  const auto trials = c.get_u64("thermometer.trials");
  const double guard = c.get_double("thermometer.guard");
  if (temps.empty()) throw ConfigError("thermometer.temperatures: empty");
  if (!(sigma >= 0.0)) throw ConfigError("thermometer.noise: must be >= 0");
  if (!(guard >= 0.0)) throw ConfigError("thermometer.guard: must be >= 0");
  for (double t : temps) {
    if (!(t >= kMinTemperature && t <= kMaxTemperature)) {
      throw ConfigError("thermometer.temperatures: outside [300, 360] K");
    }
  }
  const Thermometer thermo(fit, state.r_eff(), guard);

  csv::Table table{{"trial", "T_true_K", "noise", "r_ohm", "T_est_K", "error_K", "status"}, {}};
  auto row = [&](const std::string& trial, double t_true, double noise, double r) {
    std::string est, err, status = "ok";
    try {
      const auto reading = thermo.invert(r);
      est = csv::format_double(reading.temperature);
      err = csv::format_double(reading.temperature - t_true);
      if (reading.clamped) status = "clamped";
    } catch (const OutOfRangeError&) {
      status = "out_of_range";
    }
    table.rows.push_back({trial, csv::format_double(t_true), csv::format_double(noise),
                          csv::format_double(r), est, err, status});
  };
  for (double t : temps) row("", t, 0.0, read_resistance(state, fit, t));
  Rng noise(c.seed(), "read_noise");
  for (std::uint64_t i = 0; i < trials; ++i) {
    const double t = temps[i % temps.size()];
    const double r = read_resistance(state, fit, t) * std::exp(sigma * noise.normal());
    row(std::to_string(i), t, sigma, r);
  }
  run.emit(table, "thermometer.csv");
}

NeuronSystem neuron_system(const RunConfig& c) {
  try {
    return NeuronSystem(c.neuron(), c.seed());
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("neuron: ") + e.what());
  }
}

GainCalibration calibrate(const RunConfig& c, const NeuronSystem& system) {
  const auto loads = c.get_doubles("calibrate.loads");
  for (double l : loads) {
    if (!(l >= 0.0 && l <= 1.0)) throw ConfigError("calibrate.loads: loads must lie in [0, 1]");
  }
  return calibrate_gain(loads, system, c.gain_search());
}

csv::Table map_table(const FeedforwardMap& map) {
  csv::Table t{{"load", "t_set_K"}, {}};
  if (map.mode == FeedforwardMap::Mode::calibrated) {
    for (const auto& [l, temp] : map.table) {
      t.rows.push_back({csv::format_double(l), csv::format_double(temp)});
    }
  } else {
    for (int k = 0; k <= 20; ++k) {
      const double l = k / 20.0;
      t.rows.push_back({csv::format_double(l), csv::format_double(feedforward_setpoint(l, map))});
    }
  }
  return t;
}

csv::Table gain_table(const GainCalibration& cal) {
  csv::Table t{{"load", "rate"}, {}};
  for (std::size_t i = 0; i < cal.loads.size(); ++i) {
    t.rows.push_back({csv::format_double(cal.loads[i]), csv::format_double(cal.rates[i])});
  }
  return t;
}

csv::Table gain_summary(const GainCalibration& cal) {
  return {{"kappa_K", "onset", "variance"},
          {{csv::format_double(cal.kappa), csv::format_double(cal.onset),
            csv::format_double(cal.variance)}}};
}

// Resolves map.mode = auto by running the gain search.
NeuronSystem prepared_system(const Run& run) {
  NeuronSystem system = neuron_system(run.config);
  if (run.config.get("map.mode") == "auto") {
    const auto cal = calibrate(run.config, system);
    system.set_map(cal.map);
    run.emit(gain_summary(cal), "gain.csv");
  }
  run.emit(map_table(system.map()), "map.csv");
  return system;
}

void run_baseline(const Run& run) {
  const auto system = prepared_system(run);
  const auto loads = run.config.get_doubles("baseline.loads");
  for (double l : loads) {
    if (!(l >= 0.0 && l <= 1.0)) throw ConfigError("baseline.loads: loads must lie in [0, 1]");
  }
  const auto steps = run.config.get_u64("baseline.measure_steps");
  if (steps < 1) throw ConfigError("baseline.measure_steps: must be >= 1");
  run.emit(csv::baseline_table(baseline_curve(loads, system, steps)), "baseline.csv");
}

void run_homeostasis_cmd(const Run& run) {
  const auto pattern = run.config.pattern();
  const auto system = prepared_system(run);
  HomeostasisOptions options;
  options.presettle = run.config.get_bool("homeostasis.presettle");
  const auto result = run_homeostasis(pattern, system, options);
  run.emit(csv::window_rate_table(result.windows), "rates.csv");
  run.emit(csv::spike_group_table(result.spike_groups), "spike_groups.csv");
  run.emit(csv::spike_table(result.spike_steps), "spikes.csv");
  run.emit(csv::temperature_trace_table(result.t_dev, system.dt()), "temperature.csv");
}

void run_calibrate(const Run& run) {
  const auto system = neuron_system(run.config);
  const auto cal = calibrate(run.config, system);
  run.emit(gain_summary(cal), "gain.csv");
  run.emit(gain_table(cal), "gain_rates.csv");
  run.emit(map_table(cal.map), "map.csv");

  const auto fit = ThermalFit::defaults();
  csv::Table barriers{{"level", "r_ref_ohm", "drop", "phi_app_eV", "a_prefactor_A_per_K2",
                       "phi_b_eV", "alpha_pos", "alpha_neg"},
                      {}};
  const auto& config = run.config;
  const auto temps = config.get_doubles("iv.temperatures");
  const auto steps = static_cast<int>(config.get_u64("iv.steps"));
  for (Level level : kAllLevels) {
    const double r_ref = level_reference_resistance(level);
    const double drop = 1.0 - rho_temperature_factor(kMaxTemperature, fit.phi_for_state(r_ref));
    IVCurveSet ivs;
    try {
      ivs = run_iv_sweep(level, temps, config.get_double("iv.v_max_V"), steps, config.experiment());
    } catch (const std::invalid_argument& e) {
      throw ConfigError(std::string("iv: ") + e.what());
    }
    const auto ex = extract_thermionic(ivs);
    barriers.rows.push_back(
        {std::string(level_name(level)), csv::format_double(r_ref), csv::format_double(drop),
         csv::format_double(fit.phi_for_state(r_ref)), csv::format_double(ex.params.a_prefactor),
         csv::format_double(ex.params.phi_b), csv::format_double(ex.params.alpha_pos),
         csv::format_double(ex.params.alpha_neg)});
  }
  run.emit(barriers, "barriers.csv");
}

struct Command {
  std::function<void(const Run&)> run;
  const char* help;
};

const std::map<std::string, Command, std::less<>>& commands() {
  static const std::map<std::string, Command, std::less<>> table = {
      {"cycle", {run_cycle, "scrambled 300-360 K thermal cycle of one device"}},
      {"levels", {run_levels, "thermal cycle of every resistance level"}},
      {"iv", {run_iv, "sub-threshold IV sweeps at several temperatures"}},
      {"signature", {run_signature, "signature-plot extraction of A, phi_b, alpha"}},
      {"hsr", {run_hsr, "heat-stimulate-retention protocol"}},
      {"nullcline", {run_nullcline, "train fraction over amplitude x temperature"}},
      {"thermometer", {run_thermometer, "resistance -> temperature round trip"}},
      {"baseline", {run_baseline, "settled firing rate against input load"}},
      {"homeostasis", {run_homeostasis_cmd, "neuron with feedforward thermal control"}},
      {"calibrate", {run_calibrate, "feedforward gain search and barrier table"}},
  };
  return table;
}

std::string one_line(std::string s) {
  for (char& c : s) {
    if (c == '\n' || c == '\r') c = ' ';
  }
  return s;
}

int fail(std::ostream& err, int code, std::string_view kind, const std::string& message) {
  err << "memthermo: error code=" << code << " kind=" << kind << " message=" << one_line(message)
      << '\n';
  return code;
}

}  // namespace

int cli_dispatch(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Thermal memristor simulator and calibration toolkit", "memthermo"};
  app.set_version_flag("--version", std::string(kVersion));
  std::string config_path, out_dir, preset;
  std::optional<std::uint64_t> seed;
  app.add_option("--config", config_path, "flat key = value config (a manifest works)");
  app.add_option("--out", out_dir, "output directory");
  app.add_option("--seed", seed, "root seed");
  app.add_option("--preset", preset, "device level preset");
  app.require_subcommand(1, 1);
  for (const auto& [name, cmd] : commands()) app.add_subcommand(name, cmd.help)->fallthrough();

  try {
    std::vector<std::string> args;
    for (int i = argc - 1; i >= 1; --i) args.emplace_back(argv[i]);
    app.parse(args);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForVersion&) {
    out << kVersion << '\n';
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    return fail(err, kExitConfig, "usage", e.what());
  }
  const std::string command = app.get_subcommands().front()->get_name();

  try {
    RunConfig config;
    if (!config_path.empty()) config.merge_file(config_path);
    config.merge_environment();
    if (!out_dir.empty()) config.set("run.out", out_dir);
    if (seed) config.set("run.seed", std::to_string(*seed));
    if (!preset.empty()) config.set("device.level", preset);
    config.set("run.experiment", command);
    config.set("meta.version", kVersion);
    try {
      config.resolve();
    } catch (const std::invalid_argument& e) {
      throw ConfigError(std::string("plant.preset: ") + e.what());
    }
    config.seed();  // validate early

    const fs::path dir = config.get("run.out");
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw IoError("cannot create '" + dir.string() + "': " + ec.message());

    const Run run{config, dir, out};
    commands().find(command)->second.run(run);

    std::ofstream manifest(dir / "manifest.txt", std::ios::binary | std::ios::trunc);
    manifest << config.manifest();
    if (!manifest) throw IoError("cannot write '" + (dir / "manifest.txt").string() + "'");
    out << (dir / "manifest.txt").string() << '\n';
    return kExitOk;
  } catch (const ConfigError& e) {
    return fail(err, kExitConfig, "config", e.what());
  } catch (const IoError& e) {
    return fail(err, kExitIo, "io", e.what());
  } catch (const fs::filesystem_error& e) {
    return fail(err, kExitIo, "io", e.what());
  } catch (const ExtractionError& e) {
    return fail(err, kExitProtocol, "extraction", e.what());
  } catch (const CalibrationError& e) {
    return fail(err, kExitProtocol, "calibration", e.what());
  } catch (const OutOfRangeError& e) {
    return fail(err, kExitProtocol, "out_of_range", e.what());
  } catch (const ProtocolError& e) {
    return fail(err, kExitProtocol, "protocol", e.what());
  } catch (const std::invalid_argument& e) {
    return fail(err, kExitConfig, "config", e.what());
  } catch (const std::exception& e) {
    return fail(err, kExitProtocol, "internal", e.what());
  }
}

}  // namespace memthermo

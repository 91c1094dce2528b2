#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <vector>

#include "memthermo/errors.hpp"
#include "memthermo/experiments.hpp"

using namespace memthermo;

namespace {

// F(1.4 V) at the packaged device temperature 1 h after a step up from 300 K.
double fraction_14(double step) {
  const double deficit = step * (720.0 * std::exp(-3600.0 / 720.0) - 180.0 * std::exp(-3600.0 / 180.0)) / 540.0;
  return 0.22 + 0.05 * (step - deficit - 10.0) / 50.0;
}

}  // namespace

TEST_CASE("thermal cycling on the pristine preset") {
  const auto sched = scrambled_schedule(1);
  const auto r = run_thermal_cycling(preset_state(Level::pristine), sched, 1);
  CHECK(r.holds.size() == sched.entries.size());
  CHECK(r.trace.size() == 1 + sched.entries.size() * 600);
  CHECK(r.trace.front().t == 0.0);
  CHECK(r.trace.back().t == doctest::Approx(9 * 3600.0));
  for (const auto& h : r.holds) CHECK(h.settled);
  CHECK(total_drop(r.holds) == doctest::Approx(0.61).epsilon(0.02));
  CHECK(revisit_discrepancy(r.holds, 300.0) == 0.0);
  CHECK(r.final_state == preset_state(Level::pristine));
  for (const auto& rec : r.trace) CHECK(rec.phase == Phase::read);
}

TEST_CASE("cycling determinism and drift") {
  const auto sched = scrambled_schedule(5);
  ExperimentConfig c;
  c.drift.enabled = true;
  const auto a = run_thermal_cycling(preset_state(Level::l1), sched, 5, c);
  const auto b = run_thermal_cycling(preset_state(Level::l1), sched, 5, c);
  CHECK(a.trace == b.trace);
  const double d = revisit_discrepancy(a.holds, 300.0);
  CHECK(d > 0.0);
  CHECK(d <= 0.05);
  const auto other = run_thermal_cycling(preset_state(Level::l1), sched, 6, c);
  CHECK(other.trace != a.trace);
}

TEST_CASE("short holds are a protocol error") {
  TemperatureSchedule s;
  s.entries = {{360.0, 600.0}};
  CHECK_THROWS_AS(run_thermal_cycling(preset_state(Level::pristine), s, 1), ProtocolError);
  s.entries = {{360.0, 1.0}};
  CHECK_THROWS_AS(run_thermal_cycling(preset_state(Level::pristine), s, 1), std::invalid_argument);
}

TEST_CASE("level sweep reproduces the state-dependent sensitivity") {
  const auto sweep = run_level_sweep(kAllLevels, scrambled_schedule(1), 1);
  REQUIRE(sweep.size() == 5);
  CHECK(sweep[0].drop == doctest::Approx(0.61).epsilon(0.02));
  CHECK(sweep[4].drop == doctest::Approx(0.11).epsilon(0.05));
  for (std::size_t i = 1; i < sweep.size(); ++i) CHECK(sweep[i].drop < sweep[i - 1].drop);
  CHECK(std::abs(sweep[0].sensitivity) == doctest::Approx(1.0).epsilon(0.02));
}

TEST_CASE("heat-stimulate-retention") {
  const auto r = run_heat_stimulate_retention(preset_state(Level::l1), 360.0, 1.4, 1);
  // Oracle: the train runs at the device temperature after a 1 h stabilisation,
  // F(1.4 V, T_dev) (1 - e^{-10}) in r_eff space.
  const double sat = -std::expm1(-10.0);
  CHECK(r.final_fraction == doctest::Approx(fraction_14(60.0) * sat).epsilon(1e-9));
  CHECK(std::abs(r.final_fraction / (0.27 * sat) - 1.0) < 0.01);
  CHECK(r.retention_recovered > 0.0);
  CHECK(r.retention_recovered < 1.0);
  CHECK(r.retention_recovered == doctest::Approx(0.6 * -std::expm1(-200.0 / 50.0)).epsilon(1e-6));
  CHECK(r.reset_pulses > 0);
  CHECK(std::abs(read_resistance(r.final_state, ThermalFit::defaults(), 300.0) / 1e6 - 1.0) < 0.01);

  int program = 0, retention = 0, reset = 0;
  for (const auto& h : r.trace) {
    program += h.record.phase == Phase::program;
    retention += h.record.phase == Phase::retention;
    reset += h.record.phase == Phase::reset;
  }
  CHECK(program == 200);
  CHECK(retention == 200);
  CHECK(reset == static_cast<int>(r.reset_pulses));
  for (std::size_t i = 1; i < r.trace.size(); ++i) CHECK(r.trace[i].record.t > r.trace[i - 1].record.t);

  CHECK_THROWS_AS(run_heat_stimulate_retention(preset_state(Level::l1), 370.0, 1.4, 1),
                  std::invalid_argument);
}

TEST_CASE("nullcline sweep") {
  const std::vector<double> v{0.7, 1.4};
  const std::vector<double> t{310.0, 360.0};
  const auto sweep = run_nullcline_sweep(preset_state(Level::l1), v, t, 1);
  REQUIRE(sweep.grid.size() == 4);
  const double sat = -std::expm1(-10.0);
  CHECK(sweep.grid[0].fraction == doctest::Approx(0.02 * sat).epsilon(1e-6));
  CHECK(sweep.grid[2].fraction == doctest::Approx(0.22 * sat).epsilon(1e-6));
  CHECK(sweep.grid[3].fraction == doctest::Approx(fraction_14(60.0) * sat).epsilon(1e-6));
  CHECK(default_nullcline_voltages().size() == 8);
  CHECK(default_nullcline_temperatures().size() == 6);
}

TEST_CASE("IV sweep") {
  const auto fit = ThermalFit::defaults();
  const std::vector<double> temps{300.0, 360.0};
  const auto ivs = run_iv_sweep(Level::l2, temps, 0.4, 4);
  REQUIRE(ivs.curves.size() == 2);
  CHECK(ivs.curves[0].points.size() == 8);
  const auto p = iv_params_for_level(Level::l2, fit);
  CHECK(ivs.curves[1].points.back().i == thermionic_current(0.4, 360.0, p));
  CHECK_THROWS_AS(run_iv_sweep(Level::l2, temps, 0.6, 4), std::invalid_argument);
  CHECK_THROWS_AS(run_iv_sweep(Level::l2, temps, 0.4, 0), std::invalid_argument);
}

TEST_CASE("phase names") {
  for (Phase p : {Phase::read, Phase::program, Phase::retention, Phase::reset}) {
    CHECK(parse_phase(phase_name(p)) == p);
  }
  CHECK_THROWS_AS(parse_phase("bake"), std::invalid_argument);
}

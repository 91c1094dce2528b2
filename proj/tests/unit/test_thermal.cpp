#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <vector>

#include "memthermo/thermal.hpp"

using namespace memthermo;

namespace {

// Cascaded first-order stages after a setpoint step (tests/oracles/oracles.py).
double deficit(double step, double t, double tau_a = 180.0, double tau_d = 720.0) {
  return step * (tau_d * std::exp(-t / tau_d) - tau_a * std::exp(-t / tau_a)) / (tau_d - tau_a);
}

ThermalPlant run(ThermalPlant p, double setpoint, double seconds, double dt) {
  p.set_setpoint(setpoint);
  for (double t = 0.0; t < seconds - 1e-9; t += dt) p = plant_step(p, dt);
  return p;
}

}  // namespace

TEST_CASE("plant step is exact") {
  const auto p = run(ThermalPlant::packaged(), 310.0, 3600.0, 6.0);
  CHECK(310.0 - p.t_dev == doctest::Approx(0.08983928645062748).epsilon(1e-9));
  CHECK(310.0 - p.t_dev == doctest::Approx(deficit(10.0, 3600.0)).epsilon(1e-9));
  // Step size does not matter.
  const auto coarse = run(ThermalPlant::packaged(), 310.0, 3600.0, 600.0);
  CHECK(coarse.t_dev == doctest::Approx(p.t_dev).epsilon(1e-12));
  const auto ten_min = run(ThermalPlant::packaged(), 310.0, 600.0, 1.0);
  CHECK(310.0 - ten_min.t_dev == doctest::Approx(5.675729468936869).epsilon(1e-9));
}

TEST_CASE("plant presets") {
  CHECK(ThermalPlant::packaged().tau_dev == 720.0);
  CHECK(ThermalPlant::on_wafer().tau_dev == 60.0);
  CHECK(ThermalPlant::preset("on-wafer").tau_dev == 60.0);
  CHECK_THROWS_AS(ThermalPlant::preset("vacuum"), std::invalid_argument);
  ThermalPlant p;
  CHECK_THROWS_AS(p.set_setpoint(365.0), std::invalid_argument);
  CHECK_THROWS_AS(p.set_setpoint(NAN), std::invalid_argument);
  CHECK_THROWS_AS(plant_step(p, 0.0), std::invalid_argument);
  // Large steps stay bounded.
  p.set_setpoint(360.0);
  p = plant_step(p, 1e9);
  CHECK(p.t_dev == doctest::Approx(360.0));
}

TEST_CASE("settling criterion") {
  std::vector<ResistanceSample> h;
  for (int k = 0; k <= 100; ++k) h.push_back({k * 1.0, 1.0});
  CHECK(settled(h) == SettleStatus::insufficient_history);
  h.clear();
  for (int k = 0; k <= 600; ++k) h.push_back({k * 1.0, 5.0});
  CHECK(settled(h) == SettleStatus::settled);  // flat

  // Resistance tracking the plant after a 10 K step.
  auto history = [](double seconds) {
    std::vector<ResistanceSample> out;
    ThermalPlant p = ThermalPlant::packaged();
    p.set_setpoint(310.0);
    out.push_back({0.0, 1e6});
    for (double t = 6.0; t <= seconds + 1e-9; t += 6.0) {
      p = plant_step(p, 6.0);
      out.push_back({t, 1e6 * (1.0 - 0.01 * (p.t_dev - 300.0))});
    }
    return out;
  };
  CHECK(settled(history(3600.0)) == SettleStatus::settled);
  CHECK(settled(history(600.0)) == SettleStatus::not_settled);
  CHECK(settled({}) == SettleStatus::insufficient_history);
}

TEST_CASE("scrambled schedule") {
  // Frozen from tests/oracles/oracles.py.
  const std::vector<double> seed1{360, 330, 340, 310, 300, 320, 350, 360, 300};
  const std::vector<double> seed7{350, 360, 310, 330, 300, 340, 320, 360, 300};
  auto setpoints = [](const TemperatureSchedule& s) {
    std::vector<double> out;
    for (const auto& e : s.entries) out.push_back(e.setpoint);
    return out;
  };
  CHECK(setpoints(scrambled_schedule(1)) == seed1);
  CHECK(setpoints(scrambled_schedule(7)) == seed7);
  CHECK(scrambled_schedule(3) == scrambled_schedule(3));
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const auto s = scrambled_schedule(seed);
    REQUIRE(s.entries.size() == 9);
    CHECK(s.entries.back().setpoint == 300.0);
    CHECK(s.entries[7].setpoint == 360.0);
    CHECK(s.entries[6].setpoint != 360.0);
    CHECK(s.entries[0].hold_s == kDefaultHoldS);
  }
}

TEST_CASE("schedule validation") {
  TemperatureSchedule s;
  CHECK_THROWS_AS(s.validate(), std::invalid_argument);
  s.entries = {{305.0, 100.0}};
  CHECK_THROWS_AS(s.validate(), std::invalid_argument);
  s.entries = {{310.0, 0.0}};
  CHECK_THROWS_AS(s.validate(), std::invalid_argument);
  s.entries = {{370.0, 10.0}};
  CHECK_THROWS_AS(s.validate(), std::invalid_argument);
  const std::vector<double> bad{300.0, 315.0};
  CHECK_THROWS_AS(scrambled_schedule(1, bad), std::invalid_argument);
}

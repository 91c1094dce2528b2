#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <vector>

#include "memthermo/device.hpp"
#include "memthermo/errors.hpp"

using namespace memthermo;

namespace {

const std::vector<double> kTemps{310, 320, 330, 340, 350, 360};

}  // namespace

TEST_CASE("train fraction anchors") {
  const SwitchingParams p;
  CHECK(p.beta == doctest::Approx(std::log(11.0) / 0.7).epsilon(1e-15));
  CHECK(train_switch_fraction(0.2, 330.0, p) == 0.0);
  CHECK(train_switch_fraction(0.49, 360.0, p) == 0.0);
  CHECK(train_switch_fraction(0.7, 310.0, p) == doctest::Approx(0.02).epsilon(1e-12));
  CHECK(train_switch_fraction(1.4, 310.0, p) == doctest::Approx(0.22).epsilon(1e-14));
  CHECK(train_switch_fraction(1.4, 360.0, p) == doctest::Approx(0.27).epsilon(1e-14));
  CHECK(train_switch_fraction(1.4, 300.0, p) == doctest::Approx(0.22).epsilon(1e-14));
  CHECK(train_switch_fraction(1.4, 335.0, p) == doctest::Approx(0.245).epsilon(1e-14));
  CHECK(train_switch_fraction(-1.4, 360.0, p) == doctest::Approx(-0.27).epsilon(1e-14));
}

TEST_CASE("learning rate nearly temperature-invariant at 1.5 V") {
  const SwitchingParams p;
  const double spread = fraction_spread(1.5, kTemps, p);
  CHECK(spread <= 0.10);
  // Oracle: ramp (0.27/0.22 - 1) faded by exp(-1), relative to the mean.
  const double s360 = 1.0 + (0.27 / 0.22 - 1.0) * std::exp(-1.0);
  double mean = 0.0;
  for (double t : kTemps) mean += 1.0 + (0.27 / 0.22 - 1.0) * (t - 310.0) / 50.0 * std::exp(-1.0);
  mean /= kTemps.size();
  CHECK(spread == doctest::Approx((s360 - 1.0) / mean).epsilon(1e-12));
  CHECK(fraction_spread(1.4, kTemps, p) > spread);
}

TEST_CASE("train closed form") {
  const auto fit = ThermalFit::defaults();
  const SwitchingParams p;
  const DeviceState s0 = preset_state(Level::l1);
  const auto r = apply_pulse_train(s0, {1.4, 100e-6, 200}, 310.0, p, fit);
  const double total = 0.22 * (1.0 - std::exp(-200.0 / 20.0));
  CHECK(r.state.r_eff() == doctest::Approx(1e6 * (1.0 + total)).epsilon(1e-12));
  CHECK(r.state.r_persistent == doctest::Approx(1e6 * (1.0 + 0.4 * total)).epsilon(1e-12));
  CHECK(r.state.pulse_count == 200);
  REQUIRE(r.trace.size() == 200);
  CHECK(r.trace.back() == doctest::Approx(read_resistance(r.state, fit, 310.0)));
  // fraction after the first pulse: F (1 - e^{-1/20})
  const double f1 = r.trace.front() / read_resistance(s0, fit, 310.0);
  CHECK(f1 > 1.0);
}

TEST_CASE("train composition: segments equal one train") {
  const auto fit = ThermalFit::defaults();
  const SwitchingParams p;
  const DeviceState s0 = preset_state(Level::pristine);
  const auto whole = apply_pulse_train(s0, {-1.1, 100e-6, 150}, 340.0, p, fit);
  DeviceState s = s0;
  for (std::uint64_t n : {1u, 49u, 30u, 70u}) s = apply_pulse_train(s, {-1.1, 100e-6, n}, 340.0, p, fit).state;
  CHECK(std::abs(s.r_eff() / whole.state.r_eff() - 1.0) < 1e-12);
  CHECK(std::abs(s.r_persistent / whole.state.r_persistent - 1.0) < 1e-12);
  CHECK(s.pulse_count == whole.state.pulse_count);
}

TEST_CASE("sub-threshold trains do nothing") {
  const auto fit = ThermalFit::defaults();
  const DeviceState s0 = preset_state(Level::l2);
  const auto r = apply_pulse_train(s0, {0.2, 100e-6, 10000}, 330.0, SwitchingParams{}, fit);
  CHECK(r.state == s0);
  CHECK(r.trace.size() == 10000);
}

TEST_CASE("burn-in applies to the first train only") {
  const auto fit = ThermalFit::defaults();
  SwitchingParams p;
  p.burn_in_gain = 2.0;
  const DeviceState s0 = preset_state(Level::l1);
  const auto first = apply_pulse_train(s0, {1.0, 100e-6, 100}, 320.0, p, fit);
  auto rested = retention_run(first.state, 1000, 1.0, 300.0, p, fit).state;
  rested.r_persistent = s0.r_persistent;
  rested.r_volatile_excess = 0.0;
  const auto second = apply_pulse_train(rested, {1.0, 100e-6, 100}, 320.0, p, fit);
  const double d1 = first.state.r_eff() / s0.r_eff() - 1.0;
  const double d2 = second.state.r_eff() / rested.r_eff() - 1.0;
  CHECK(d1 == doctest::Approx(2.0 * d2).epsilon(1e-12));
}

TEST_CASE("resistance bounds clamp") {
  const auto fit = ThermalFit::defaults();
  SwitchingParams p;
  p.g_14_310 = 0.9;
  p.g_14_360 = 0.95;
  DeviceState s;
  s.r_persistent = 1.2e3;
  for (int i = 0; i < 20; ++i) s = apply_pulse_train(s, {-2.0, 100e-6, 200}, 300.0, p, fit).state;
  CHECK(s.r_eff() >= kResistanceFloor);
  CHECK(s.r_persistent >= kResistanceFloor);
  s.r_persistent = 29e6;
  s.r_volatile_excess = 0;
  s = apply_pulse_train(s, {2.0, 100e-6, 200}, 300.0, p, fit).state;
  CHECK(s.r_eff() <= kResistanceCeiling);
}

TEST_CASE("retention") {
  const auto fit = ThermalFit::defaults();
  const SwitchingParams p;
  const auto trained = apply_pulse_train(preset_state(Level::l1), {1.4, 100e-6, 200}, 360.0, p, fit);
  const double excess = trained.state.r_volatile_excess;
  REQUIRE(excess > 0.0);
  const auto ret = retention_run(trained.state, 50, 1.0, 360.0, p, fit);
  CHECK(ret.state.r_volatile_excess == doctest::Approx(excess * std::exp(-1.0)).epsilon(1e-12));
  CHECK(ret.state.r_persistent == trained.state.r_persistent);
  CHECK_FALSE(ret.state.train.active);
  for (std::size_t i = 1; i < ret.trace.size(); ++i) CHECK(ret.trace[i] < ret.trace[i - 1]);
  // Incomplete recovery: the persistent share stays.
  const auto long_ret = retention_run(trained.state, 5000, 1.0, 360.0, p, fit);
  CHECK(long_ret.state.r_eff() > 1e6);
  CHECK_THROWS_AS(retention_run(trained.state, 0, 1.0, 360.0, p, fit), std::invalid_argument);
}

TEST_CASE("reset to reference") {
  const auto fit = ThermalFit::defaults();
  const SwitchingParams p;
  const DeviceState s0 = preset_state(Level::l1);

  SUBCASE("already at target") {
    const auto r = reset_to_reference(s0, 1e6, p, fit);
    CHECK(r.pulses_applied == 0);
    CHECK(r.state == s0);
  }
  SUBCASE("from 1.25 x target") {
    DeviceState s = s0;
    s.r_persistent = 1.25e6;
    s.r_volatile_excess = 5e4;
    const auto r = reset_to_reference(s, 1e6, p, fit);
    const double final_r = read_resistance(r.state, fit, 300.0);
    CHECK(std::abs(final_r - 1e6) / 1e6 < 0.01);
    CHECK(r.pulses_applied > 0);
    CHECK(r.pulses_applied == r.trace.size());
    CHECK(r.pulse_v.front() == -p.reset_v);
    CHECK(r.state.r_volatile_excess == 0.0);
  }
  SUBCASE("upwards") {
    DeviceState s = s0;
    s.r_persistent = 0.8e6;
    const auto r = reset_to_reference(s, 1e6, p, fit);
    CHECK(std::abs(read_resistance(r.state, fit, 300.0) / 1e6 - 1.0) < 0.01);
    CHECK(r.pulse_v.front() == p.reset_v);
  }
  SUBCASE("below the floor") {
    try {
      (void)reset_to_reference(s0, 500.0, p, fit);
      FAIL("expected ResetError");
    } catch (const ResetError& e) {
      CHECK(e.last_resistance() == doctest::Approx(1e6));
    }
  }
  SUBCASE("bad target") { CHECK_THROWS_AS(reset_to_reference(s0, 0.0, p, fit), std::invalid_argument); }
}

TEST_CASE("switching parameter validation") {
  SwitchingParams p;
  CHECK_NOTHROW(p.validate());
  p.eta_nv = 0.0;
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);
  p = {};
  p.g_14_360 = 0.1;
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);
  p = {};
  p.v_th = 0.8;
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);
  p = {};
  p.reset_v = 0.4;
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);
  CHECK_THROWS_AS(apply_pulse_train({}, {1.0, 0.0, 1}, 300.0, {}, ThermalFit::defaults()),
                  std::invalid_argument);
  CHECK_THROWS_AS(apply_pulse_train({}, {1.0, 1e-4, 0}, 300.0, {}, ThermalFit::defaults()),
                  std::invalid_argument);
}

#include <pybind11/pybind11.h>
#include <pybind11/operators.h>
#include <pybind11/stl.h>

#include <string>
#include <vector>

#include "memthermo/calibration.hpp"
#include "memthermo/cli.hpp"
#include "memthermo/config.hpp"
#include "memthermo/device.hpp"
#include "memthermo/errors.hpp"
#include "memthermo/experiments.hpp"
#include "memthermo/homeostasis.hpp"
#include "memthermo/thermal.hpp"

#include <sstream>

namespace py = pybind11;
using namespace memthermo;

PYBIND11_MODULE(_core, m) {
  m.doc() = "Thermal memristor simulator core";
  m.attr("__version__") = std::string(kVersion);
  m.attr("K_BOLTZMANN_EV") = kBoltzmannEv;

  auto base = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<ConfigError>(m, "ConfigError", base.ptr());
  py::register_exception<CalibrationError>(m, "CalibrationError", base.ptr());
  py::register_exception<ExtractionError>(m, "ExtractionError", base.ptr());
  auto protocol = py::register_exception<ProtocolError>(m, "ProtocolError", base.ptr());
  py::register_exception<ResetError>(m, "ResetError", protocol.ptr());
  py::register_exception<OutOfRangeError>(m, "OutOfRangeError", base.ptr());
  py::register_exception<IoError>(m, "IoError", base.ptr());

  py::enum_<Level>(m, "Level")
      .value("pristine", Level::pristine)
      .value("l1", Level::l1)
      .value("l2", Level::l2)
      .value("l3", Level::l3)
      .value("l4", Level::l4);

  py::class_<ThermionicParams>(m, "ThermionicParams")
      .def(py::init<>())
      .def_readwrite("a_prefactor", &ThermionicParams::a_prefactor)
      .def_readwrite("phi_b", &ThermionicParams::phi_b)
      .def_readwrite("alpha_pos", &ThermionicParams::alpha_pos)
      .def_readwrite("alpha_neg", &ThermionicParams::alpha_neg);

  py::class_<ThermalFit>(m, "ThermalFit")
      .def_static("defaults", &ThermalFit::defaults)
      .def("phi_for_state", &ThermalFit::phi_for_state);

  py::class_<DeviceState>(m, "DeviceState")
      .def(py::init<>())
      .def_readwrite("r_persistent", &DeviceState::r_persistent)
      .def_readwrite("r_volatile_excess", &DeviceState::r_volatile_excess)
      .def_readonly("pulse_count", &DeviceState::pulse_count)
      .def("r_eff", &DeviceState::r_eff)
      .def(py::self == py::self);

  m.def("thermionic_current", &thermionic_current, py::arg("v"), py::arg("temperature"),
        py::arg("params"));
  m.def("rho_temperature_factor", &rho_temperature_factor, py::arg("temperature"),
        py::arg("phi_app"));
  m.def("barrier_shift_response", &barrier_shift_response, py::arg("temperature"),
        py::arg("phi_app"), py::arg("dphi"));
  m.def("calibrate_phi_from_drop", &calibrate_phi_from_drop, py::arg("total_drop"));
  m.def("preset_state", &preset_state, py::arg("level"));
  m.def("level_reference_resistance", &level_reference_resistance, py::arg("level"));
  m.def("read_resistance", &read_resistance, py::arg("state"), py::arg("fit"),
        py::arg("temperature"));
  m.def("iv_params_for_level", &iv_params_for_level, py::arg("level"),
        py::arg("fit") = ThermalFit::defaults());
  m.def("train_switch_fraction",
        [](double v, double t) { return train_switch_fraction(v, t, SwitchingParams{}); },
        py::arg("v"), py::arg("temperature"));
  m.def(
      "apply_pulse_train",
      [](const DeviceState& s, double v, std::uint64_t count, double t) {
        auto r = apply_pulse_train(s, {v, 100e-6, count}, t, SwitchingParams{},
                                   ThermalFit::defaults());
        return py::make_tuple(r.state, r.trace);
      },
      py::arg("state"), py::arg("v"), py::arg("count"), py::arg("temperature"));

  m.def(
      "thermal_cycle",
      [](Level level, std::uint64_t seed, bool drift) {
        ExperimentConfig c;
        c.drift.enabled = drift;
        const auto r = run_thermal_cycling(preset_state(level), scrambled_schedule(seed), seed, c);
        py::list holds;
        for (const auto& h : r.holds) holds.append(py::make_tuple(h.setpoint, h.r_end, h.r_steady));
        return py::make_tuple(total_drop(r.holds), revisit_discrepancy(r.holds, 300.0), holds);
      },
      py::arg("level"), py::arg("seed") = 1, py::arg("drift") = false);

  m.def(
      "extract_thermionic",
      [](Level level, std::vector<double> temps, double v_max, int steps) {
        const auto ex = extract_thermionic(run_iv_sweep(level, temps, v_max, steps));
        return py::make_tuple(ex.params, ex.diagnostics.stage1_min_r2,
                              ex.diagnostics.thermionic_consistent);
      },
      py::arg("level"), py::arg("temperatures") = std::vector<double>{300, 330, 360},
      py::arg("v_max") = 0.45, py::arg("steps") = 8);

  m.def("invert_temperature", &invert_temperature, py::arg("r_measured"), py::arg("fit"),
        py::arg("r_eff"), py::arg("guard") = kThermometerGuard);

  m.def(
      "baseline_curve",
      [](std::vector<double> loads, double kappa, double onset, std::uint64_t seed) {
        NeuronConfig c;
        c.map = FeedforwardMap::affine(kappa, onset);
        return baseline_curve(loads, NeuronSystem(c, seed));
      },
      py::arg("loads"), py::arg("kappa") = 0.0, py::arg("onset") = 0.0, py::arg("seed") = 1);

  m.def(
      "cli",
      [](std::vector<std::string> args) {
        std::vector<const char*> argv{"memthermo"};
        for (const auto& a : args) argv.push_back(a.c_str());
        std::ostringstream out, err;
        const int code = cli_dispatch(static_cast<int>(argv.size()), argv.data(), out, err);
        return py::make_tuple(code, out.str(), err.str());
      },
      py::arg("args"));
}

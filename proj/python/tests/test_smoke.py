import math
import os

import pytest

import memthermo as mt


def test_version():
    assert mt.__version__ == "0.1.0"


def test_rho_and_calibration():
    phi = mt.calibrate_phi_from_drop(0.61)
    assert phi == pytest.approx(0.089494260458851719, rel=1e-10)
    assert mt.rho_temperature_factor(360.0, phi) == pytest.approx(0.39, rel=1e-12)
    assert mt.rho_temperature_factor(300.0, phi) == 1.0


def test_thermionic_current_sign():
    p = mt.iv_params_for_level(mt.Level.l2)
    assert mt.thermionic_current(0.3, 330.0, p) > 0
    assert mt.thermionic_current(-0.3, 330.0, p) < 0


def test_device_and_switching():
    s = mt.preset_state(mt.Level.l1)
    assert mt.level_reference_resistance(mt.Level.l1) == 1e6
    assert mt.train_switch_fraction(1.4, 310.0) == pytest.approx(0.22)
    after, trace = mt.apply_pulse_train(s, 1.4, 200, 310.0)
    assert len(trace) == 200
    assert after.r_eff() == pytest.approx(1e6 * (1 + 0.22 * -math.expm1(-10.0)))


def test_thermal_cycle():
    drop, revisit, holds = mt.thermal_cycle(mt.Level.pristine)
    assert drop == pytest.approx(0.61, rel=0.02)
    assert revisit <= 1e-9
    assert len(holds) == 9


def test_extraction_round_trip():
    params, r2, consistent = mt.extract_thermionic(mt.Level.l2, [300.0, 330.0, 360.0], 0.45, 8)
    truth = mt.iv_params_for_level(mt.Level.l2)
    assert consistent
    assert r2 > 0.999
    assert params.phi_b == pytest.approx(truth.phi_b, rel=5e-3)


def test_errors_are_typed():
    assert issubclass(mt.CalibrationError, mt.Error)
    with pytest.raises(mt.CalibrationError):
        mt.calibrate_phi_from_drop(0.01)


def test_cli(tmp_path):
    code, out, err = mt.cli(["iv", "--out", str(tmp_path)])
    assert code == 0, err
    assert (tmp_path / "iv.csv").read_text().startswith("T_K,v_V,i_A\n")
    assert "run.experiment = iv" in (tmp_path / "manifest.txt").read_text()
    code, _, err = mt.cli(["bake"])
    assert code == 1


@pytest.mark.skipif("TEST_MEMTHERMO_CLI" not in os.environ, reason="CLI path not provided")
def test_cli_binary(tmp_path):
    import subprocess

    r = subprocess.run([os.environ["TEST_MEMTHERMO_CLI"], "cycle", "--out", str(tmp_path)])
    assert r.returncode == 0
    assert (tmp_path / "trace.csv").exists()

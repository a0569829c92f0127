import json
import math

import numpy as np
import pytest

from plasmon_kerr.cli import EXIT_DOMAIN, EXIT_OK, EXIT_USAGE, EXIT_VERIFY, main, run, run_oracle_check
from plasmon_kerr.config import RunConfig, config_from_output, parse_metadata
from plasmon_kerr.errors import ParameterError
from plasmon_kerr.plasmon_env import synthetic_fixture, write_rate_table
from plasmon_kerr.susceptibility import SusceptibilityPoint, chi1, chi3


def read_rows(path):
    lines = [ln for ln in open(path).read().splitlines() if not ln.startswith("#")]
    header = lines[0].split(",")
    return header, np.array([[float(v) for v in ln.split(",")] for ln in lines[1:]])


def test_spectrum_free_space(tmp_path):
    out = tmp_path / "s.csv"
    assert main(["spectrum", "--free-space", "--out", str(out)]) == EXIT_OK
    header, rows = read_rows(out)
    assert header == ["delta", "re_chi1", "im_chi1", "re_chi3", "im_chi3"]
    assert len(rows) == math.floor(12 / 0.05) + 1
    peak = rows[np.argmax(rows[:, 2])]
    assert peak[0] == pytest.approx(0.0, abs=1e-12)
    assert peak[2] == pytest.approx(1 / 1.3, abs=1e-12)


def test_spectrum_gain_dip(tmp_path):
    out = tmp_path / "s.csv"
    cfg = {"environment": {"source": "fixture", "distance_in_c_over_omega_p": 0.2}}
    assert main(["spectrum", "--config-json", json.dumps(cfg), "--out", str(out)]) == EXIT_OK
    _, rows = read_rows(out)
    centre = rows[np.argmin(np.abs(rows[:, 0]))]
    assert centre[2] < 0


def test_csv_is_deterministic_and_round_trips(tmp_path):
    cfg_path = tmp_path / "cfg.json"
    cfg_path.write_text(json.dumps({"environment": {"source": "explicit", "gamma_in_gamma0": 0.9,
                                                    "kappa_in_gamma0": 0.5},
                                    "drive": {"phi_in_rad": 0.4}}))
    a = tmp_path / "a.csv"
    assert main(["spectrum", "--config", str(cfg_path), "--out", str(a)]) == 0
    first = a.read_bytes()
    assert main(["spectrum", "--config", str(cfg_path), "--out", str(a)]) == 0
    assert a.read_bytes() == first
    back = config_from_output(a)
    assert back.environment["kappa_in_gamma0"] == 0.5
    assert back.drive["phi_in_rad"] == 0.4
    assert back.output["path"] == str(a)
    assert run(back).text.encode() == first


def test_values_carry_full_precision(tmp_path):
    out = tmp_path / "s.csv"
    main(["spectrum", "--free-space", "--out", str(out)])
    _, rows = read_rows(out)
    cfg = config_from_output(out)
    exact = chi1(rows[:, 0], 1.5, 0.0, cfg.system_params(), cfg.environment_params())
    assert np.array_equal(rows[:, 2], exact.imag)


def test_phase_sweep(tmp_path):
    out = tmp_path / "p.csv"
    cfg = {"environment": {"source": "fixture", "distance_in_c_over_omega_p": 0.4}, "sweep": {"phi_points": 5}}
    assert main(["phase-sweep", "--config-json", json.dumps(cfg), "--out", str(out)]) == 0
    header, rows = read_rows(out)
    assert header == ["phi", "re_chi3", "im_chi3", "re_chi1", "im_chi1"]
    assert rows[0, 1] == pytest.approx(0.0, abs=1e-12)
    assert rows[2, 1] == pytest.approx(0.0, abs=1e-12)
    np.testing.assert_allclose(rows[0, 1:], rows[-1, 1:], rtol=1e-12, atol=1e-15)
    assert np.sign(rows[1, 1]) == -np.sign(rows[3, 1]) != 0


def test_distance_sweep_and_threshold(tmp_path):
    rates = tmp_path / "rates.csv"
    write_rate_table(synthetic_fixture(), rates)
    out = tmp_path / "d.csv"
    assert main(["distance-sweep", "--rates", str(rates), "--out", str(out)]) == 0
    header, rows = read_rows(out)
    assert header[0] == "d" and len(rows) == 91
    assert main(["threshold", "--rates", str(rates), "--out", str(out)]) == 0
    header, rows = read_rows(out)
    assert np.allclose(rows[:, 4], rows[:, 5], atol=1e-9)
    assert main(["threshold", "--rates", str(rates), "--distance", "0.3", "--out", str(out)]) == 0
    _, rows = read_rows(out)
    assert rows.shape == (1, 6) and rows[0, 0] == 0.3
    assert main(["threshold", "--free-space", "--out", str(out)]) == 0
    _, rows = read_rows(out)
    assert math.isnan(rows[0, 4])


def test_map_with_svg(tmp_path):
    out = tmp_path / "m.csv"
    cfg = {"environment": {"source": "fixture", "distance_in_c_over_omega_p": 0.4},
           "vortex": {"l": 2, "n": 61}}
    assert main(["map", "--config-json", json.dumps(cfg), "--out", str(out), "--svg"]) == 0
    meta = parse_metadata(out.read_text())
    assert meta["l"] == "2" and meta["X"] == "1.5" and meta["gamma_prime"] == "0.29999999999999999"
    assert meta["d"] == "0.40000000000000002"
    assert meta["angular_extrema_at_w"] == "2,2"
    header, rows = read_rows(out)
    assert header == ["x", "y", "value"] and rows.shape == (61 * 61, 3)
    svg = (tmp_path / "m.svg").read_text()
    assert svg.lstrip().startswith("<?xml") and "min=" in svg and "max=" in svg


def test_free_space_map_is_flat(tmp_path):
    out = tmp_path / "m.csv"
    assert main(["map", "--free-space", "--config-json", '{"vortex": {"n": 41}}', "--out", str(out)]) == 0
    assert parse_metadata(out.read_text())["angular_extrema_at_w"] == "0,0"


def test_oracle_check_first_order_passes(tmp_path):
    out = tmp_path / "o.csv"
    assert main(["oracle-check", "--draws", "6", "--orders", "1", "--out", str(out)]) == EXIT_OK
    assert parse_metadata(out.read_text())["failures"] == "0/6"


def test_oracle_check_reports_cubic_mismatch(tmp_path):
    out = tmp_path / "o.csv"
    assert main(["oracle-check", "--draws", "3", "--oracle-env", "fixture", "--out", str(out)]) == EXIT_VERIFY
    assert "FAIL" in out.read_text()


def test_oracle_check_corrupted_formula_fails():
    def wrong_sign(delta, x, phi, sysp, env):
        return SusceptibilityPoint(-chi1(delta, x, phi, sysp, env), chi3(delta, x, phi, sysp, env))
    cfg = RunConfig.from_dict({"scenario": "oracle_check", "oracle": {"draws": 2, "orders": [1]}})
    assert run_oracle_check(cfg).exit_code == EXIT_OK
    assert run_oracle_check(cfg, analytic=wrong_sign).exit_code == EXIT_VERIFY


@pytest.mark.parametrize("argv", [
    ["bogus"],
    ["spectrum", "--distance", "0.3"],
    ["spectrum", "--free-space", "--distance", "0.3"],
    ["spectrum", "--svg"],
    ["map", "--svg"],
    ["spectrum", "--config-json", "{not json"],
    ["spectrum", "--config-json", '{"nonsense": 1}'],
    ["spectrum", "--config", "/nonexistent/cfg.json"],
    ["distance-sweep", "--free-space"],
    ["oracle-check", "--draws", "0"],
    ["oracle-check", "--orders", "2"],
    ["spectrum", "--config-json", '{"system": {"gamma_prime_in_gamma0": -1}}'],
])
def test_usage_errors(argv, capsys):
    assert main(argv) == EXIT_USAGE


@pytest.mark.parametrize("cfg", [
    {"environment": {"source": "fixture", "distance_in_c_over_omega_p": 3.0}},
    {"sweep": {"delta_step_in_gamma0": 0.0}},
    {"environment": {"source": "rates", "gamma_perp_in_gamma0": 0.0, "gamma_par_in_gamma0": 0.0}},
])
def test_domain_errors(cfg):
    assert main(["spectrum", "--config-json", json.dumps(cfg)]) == EXIT_DOMAIN


def test_unwritable_output():
    assert main(["spectrum", "--free-space", "--out", "/nonexistent/dir/out.csv"]) == EXIT_USAGE


def test_config_validation():
    with pytest.raises(ParameterError):
        RunConfig(scenario="plot")
    with pytest.raises(ParameterError):
        RunConfig.from_dict({"environment": {"source": "moon"}})
    cfg = RunConfig.from_dict({"scenario": "phase-sweep"})
    assert cfg.scenario == "phase_sweep"
    assert RunConfig.from_dict(json.loads(cfg.to_json())) == cfg

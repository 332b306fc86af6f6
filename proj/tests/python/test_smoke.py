import math

import pytest

import fixedsnr


def test_topology_small_grid():
    t = fixedsnr.topology(2, seed=7, k0=1)
    assert t["c0_cluster"] == 2
    assert t["c0_sub"] == 8
    assert len(t["pairs"]) == 32


def test_simulate_reports_rates():
    r = fixedsnr.simulate(2, trials=300, calibration_trials=200, threads=1)
    assert r["beta2"] > 0
    assert math.isclose(r["gamma2_bits"], 0.5 * math.log2(1 + r["beta2"]))
    assert 0 < r["rho"] <= 1


def test_simulate_is_reproducible():
    a = fixedsnr.simulate(2, trials=100, calibration_trials=50, seed=3)
    b = fixedsnr.simulate(2, trials=100, calibration_trials=50, seed=3)
    assert a == b


def test_scalar_helpers():
    assert fixedsnr.gmi_lower_bound(1.0, 0.0, 1.0) == pytest.approx(1.0)
    assert fixedsnr.error_prob_bound(10, 2.0, 1.0) == pytest.approx(2.0**-10)
    assert fixedsnr.ledger_total(4, 100, 3, 3)["total"] == 2600
    slope, _, _, r2 = fixedsnr.fit_exponent([1.0, 10.0, 100.0], [2.0, 20.0, 200.0])
    assert slope == pytest.approx(1.0)
    assert r2 == pytest.approx(1.0)


def test_errors_map_to_python():
    with pytest.raises(ValueError):
        fixedsnr.topology(1)
    with pytest.raises(fixedsnr.ColoringError):
        fixedsnr.topology(2, k0=1, max_colors=1)


def test_cli_entry():
    code, out, _ = fixedsnr.run_cli(["topology", "--m", "2", "--k0", "1"])
    assert code == 0
    assert '"c0_cluster": 2' in out
    code, _, _ = fixedsnr.run_cli(["topology", "--m", "1"])
    assert code == 2

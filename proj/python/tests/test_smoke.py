import math
from pathlib import Path

import pytest

import finepot

CONFIGS = Path(__file__).resolve().parents[2] / "configs"


def test_linear_path_is_exact():
    sp = finepot.path(16)
    xs = [sp.coord(v)[0] for v in range(len(sp))]
    domain = [0 < v < len(sp) - 1 for v in range(len(sp))]
    out = finepot.solve(sp, domain, [3 * x for x in xs], p=3.0)
    assert out["converged"]
    assert max(abs(u - 3 * x) for u, x in zip(out["u"], xs)) < 1e-8


def test_obstacle_is_respected():
    sp = finepot.path(8)
    n = len(sp)
    lower = [-math.inf] * n
    lower[n // 2] = 0.75
    out = finepot.solve(sp, [0 < v < n - 1 for v in range(n)], [0.0] * n, lower=lower)
    assert out["u"][n // 2] == pytest.approx(0.75)
    assert out["energy"] == pytest.approx(2.25)


def test_interval_condenser():
    sp = finepot.path(10, 0.0, 2.0)
    n = len(sp)
    a0 = [v == 0 for v in range(n)]
    a1 = [v == n - 1 for v in range(n)]
    cap = finepot.condenser_capacity(sp, a0, a1, [True] * n, p=3.0)
    assert cap["value"] == pytest.approx(2.0 ** (1 - 3.0), rel=1e-8)


def test_mask_size_is_checked():
    sp = finepot.path(4)
    with pytest.raises(finepot.Error):
        finepot.solve(sp, [True], [0.0] * len(sp))


def test_swiss_cheese_rates():
    rep = finepot.swiss_cheese_report()
    assert rep["regime"] == "subcritical"
    assert rep["thinness_rate"] == pytest.approx(3.5)
    assert rep["thinness_total"] == pytest.approx(1 / (2**3.5 - 1))
    with pytest.raises(finepot.Error, match="α > n/"):
        finepot.swiss_cheese_report(alpha=3.0)


def test_closed_forms():
    assert finepot.mazya_constant(2.0) == pytest.approx(4 * math.log(2))
    assert finepot.weighted_line_solution(0.5, 2.0) == pytest.approx(math.log(1.5) / math.log(2))
    energies = finepot.p_to_one_energies(2.0**-10, [1, 4])
    assert energies == pytest.approx([1.5, 1.125])
    assert finepot.sha256_text("abc").startswith("ba7816bf")


def test_config_and_criterion():
    out = finepot.solve_config(str(CONFIGS / "linear_1d.json"))
    assert out["energy"] == pytest.approx(1.0, abs=1e-10)
    r = finepot.run_criterion(11)
    assert r["passed"], r["detail"]

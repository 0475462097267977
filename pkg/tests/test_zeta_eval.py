from __future__ import annotations

import mpmath
import numpy as np
import pytest

from hybridzeta.errors import BudgetExceeded, UnsupportedHeight
from hybridzeta.zeta_eval import (
    EvalPolicy,
    abs_power_grid,
    eval_zeta_half,
    grid_spacing,
    rs_bound,
    theta,
    zeta_em,
    zeta_grid,
    zeta_half_array,
    zeta_rs,
)


def mp_zeta(t: float) -> complex:
    with mpmath.workdps(30):
        return complex(mpmath.zeta(mpmath.mpc(0.5, t)))


@pytest.mark.parametrize("t", [0.0, 1.0, 14.13, 29.9, 30.0, 31.0, 50.0, 100.0, 500.0, 5000.0, 123456.7])
def test_matches_mpmath_within_bound(t):
    s = eval_zeta_half(t)
    assert abs(s.value - mp_zeta(t)) <= max(s.err_bound, 1e-15)
    assert s.err_bound <= 1e-6


def test_zeta_half_at_zero():
    s = eval_zeta_half(0.0)
    assert s.value.imag == 0.0
    assert s.value.real == pytest.approx(-1.4603545088095868, abs=1e-12)


def test_first_zero():
    assert abs(eval_zeta_half(14.134725).value) <= 1e-3


@pytest.mark.parametrize("t", [5.0, 50.0, 500.0])
def test_reflection(t):
    v, e = zeta_half_array([t, -t])
    assert abs(abs(v[0]) - abs(v[1])) <= 2 * e.max() + 1e-15
    assert v[1] == pytest.approx(np.conj(v[0]))


def test_abs2k_propagated_error():
    s = eval_zeta_half(77.7, k=2.0)
    a = abs(s.value)
    assert s.abs2k >= 0
    assert abs(s.abs2k - a**4) <= 2 * s.err_bound * 2 * a**3 + 1e-12


def test_rs_and_em_agree_on_overlap():
    t = np.linspace(30, 100, 41)
    em = zeta_half_array(t, EvalPolicy("euler_maclaurin"))
    rs = zeta_half_array(t, EvalPolicy("riemann_siegel", 1e-5, 4))
    assert np.all(np.abs(em[0] - rs[0]) <= em[1] + rs[1] + 1e-14)


def test_higher_order_never_looser():
    t = np.linspace(100, 1e4, 50)
    bounds = [rs_bound(t, k) for k in range(5)]
    for lo, hi in zip(bounds, bounds[1:]):
        assert np.all(hi <= lo)


def test_rs_high_height_double_double():
    t = 2.0e6
    with mpmath.workdps(40):
        ref = complex(mpmath.zeta(mpmath.mpc(0.5, t)))
    v, err, _ = zeta_rs(np.array([t]), order=4, precision="dd")
    assert abs(v[0] - ref) <= err[0]


def test_unsupported_height():
    with pytest.raises(UnsupportedHeight):
        eval_zeta_half(100.0, EvalPolicy("riemann_siegel", 1e-12, 0))


def test_policy_validation():
    with pytest.raises(ValueError):
        EvalPolicy(rs_correction_order=5)
    with pytest.raises(ValueError):
        EvalPolicy(target_abs_err=0)


def test_em_off_line():
    with mpmath.workdps(30):
        ref = complex(mpmath.zeta(mpmath.mpc(2.0, 3.0)))
    value, err = zeta_em(complex(2.0, 3.0))
    assert abs(value[0] - ref) <= err[0] + 1e-15
    assert err[0] < 1e-12


def test_theta_matches_mpmath():
    for t in (30.0, 1000.0, 1e5):
        assert theta(t) == pytest.approx(float(mpmath.siegeltheta(t)), abs=1e-9)


def test_small_grid():
    samples = abs_power_grid(10, 11, 1)
    assert len(samples) >= 4
    assert all(s.abs2k >= 0 for s in samples)
    assert [s.t for s in samples] == sorted(s.t for s in samples)


def test_grid_refinement_oracle():
    h = grid_spacing(110)
    n = int(np.ceil(10 / h)) + 1
    g1 = zeta_grid(100, 10 / (n - 1), n)
    g2 = zeta_grid(100, 10 / (2 * n - 2), 2 * n - 1)
    i1 = np.trapezoid(g1.abs2, g1.t)
    i2 = np.trapezoid(g2.abs2, g2.t)
    assert 0.5 * i2 <= i1 <= 2 * i2


def test_k2_is_square_of_k1():
    a = abs_power_grid(200, 210, 1)
    b = abs_power_grid(200, 210, 2)
    assert np.array_equal(np.array([s.abs2k for s in a]) ** 2, np.array([s.abs2k for s in b]))


def test_grid_budget():
    with pytest.raises(BudgetExceeded):
        abs_power_grid(0, 1e4, 1, max_points=100)

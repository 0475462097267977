from __future__ import annotations

import math

import mpmath
import numpy as np
import pytest

from hybridzeta.errors import DomainError, TailDiverges
from hybridzeta.mellin import (
    MellinSpec,
    fit_tail_exponent,
    growth_exponent,
    moment_tail_constant,
    tail_bound,
    z2_eval,
    z2_meansq_scan,
)
from hybridzeta.quadrature import QuadratureSpec


def test_invalid_parameters():
    with pytest.raises(DomainError):
        MellinSpec(1.0)
    with pytest.raises(DomainError):
        MellinSpec(1.5, X_trunc=5.0)


def test_against_mpmath_quad_short_range():
    # short truncation so that mpmath can integrate the quartic directly
    X = 20.0
    with mpmath.workdps(20):
        ref = mpmath.quad(lambda x: abs(mpmath.zeta(0.5 + 1j * x)) ** 4 * x ** mpmath.mpc(-1.5, -3.0), mpmath.linspace(1, X, 40))
    ref = complex(ref)
    r = z2_eval(MellinSpec(1.5, 3.0, X))
    assert abs(r.value - ref) <= r.est_err - r.tail_bound
    fine = z2_eval(MellinSpec(1.5, 3.0, X), q=QuadratureSpec(spacing_c=0.0025)).value
    assert abs(fine - ref) <= 1e-7 * abs(ref)


def test_truncation_within_tail_bound():
    a = z2_eval(MellinSpec(1.5, 0.0, 1e3))
    b = z2_eval(MellinSpec(1.5, 0.0, 4e3))
    assert abs(b.value - a.value) <= a.tail_bound


@pytest.mark.parametrize("X", [100.0, 1000.0])
def test_truncation_self_consistency(X):
    a = z2_eval(MellinSpec(1.5, 0.0, X))
    b = z2_eval(MellinSpec(1.5, 0.0, 2 * X))
    assert abs(b.value - a.value) < a.tail_bound


def test_positive_and_decreasing_in_sigma():
    vals = [z2_eval(MellinSpec(s, 0.0)).value for s in (2.0, 2.25, 2.5)]
    assert all(abs(v.imag) <= 1e-12 * abs(v) for v in vals)
    re = [v.real for v in vals]
    assert re[0] > re[1] > re[2] > 0


def test_sigma_near_one_is_finite():
    r = z2_eval(MellinSpec(1.25, 0.0))
    assert math.isfinite(r.modulus) and math.isfinite(r.tail_bound) and r.est_err >= r.tail_bound


def test_power_tail_diverges():
    with pytest.raises(TailDiverges):
        z2_eval(MellinSpec(1.5, tail_mode="power"))
    assert math.isfinite(tail_bound(MellinSpec(2.0, tail_mode="power")))


def test_moment_tail_constant_positive():
    assert 0 < moment_tail_constant() < 1


def test_conjugate_symmetry():
    a = z2_eval(MellinSpec(1.5, 7.0)).value
    b = z2_eval(MellinSpec(1.5, -7.0)).value
    assert abs(a - b.conjugate()) <= 1e-12 * abs(a)


def test_meansq_scan():
    s = z2_meansq_scan(1.3, 1.0, 50.0, 100)
    assert math.isfinite(s.slope)
    assert np.all(np.diff(s.partial) >= 0)
    assert s.z2_abs2.shape == s.t.shape == s.partial.shape


def test_scan_matches_pointwise():
    s = z2_meansq_scan(1.5, 1.0, 10.0, 10)
    r = z2_eval(MellinSpec(1.5, float(s.t[3])))
    assert abs(s.z2_abs2[3] - r.modulus**2) <= 2 * r.modulus * (r.est_err - r.tail_bound)


def test_tail_exponent_fit():
    tau = fit_tail_exponent()
    assert 0.3 < tau < 1.0


def test_growth_exponent():
    assert growth_exponent(1.25, 1.5) == pytest.approx((6 + 4 - 10) / 3.5)

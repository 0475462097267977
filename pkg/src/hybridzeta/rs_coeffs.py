"""Riemann-Siegel correction polynomials C_0..C_4.

The coefficients are expressed through derivatives of

    Psi(p) = cos(2 pi (p^2 - p - 1/16)) / cos(2 pi p),

which is entire.  We expand Psi(1/2 + x) as a power series in x with
mpmath at high precision once, differentiate the series exactly and keep
float64 coefficient arrays for Horner evaluation on x in [-1/2, 1/2).
"""

from __future__ import annotations

from functools import lru_cache

import mpmath
import numpy as np

_DEGREE = 72
_DPS = 120

# C_k = sum over (derivative order, rational coefficient, power of pi^-2)
_COMBINATIONS = (
    ((0, 1, 0),),
    ((3, -mpmath.mpf(1) / 96, 1),),
    ((2, mpmath.mpf(1) / 64, 1), (6, mpmath.mpf(1) / 18432, 2)),
    ((1, -mpmath.mpf(1) / 64, 1), (5, -mpmath.mpf(1) / 3840, 2), (9, -mpmath.mpf(1) / 5308416, 3)),
    (
        (0, mpmath.mpf(1) / 128, 1),
        (4, mpmath.mpf(19) / 24576, 2),
        (8, mpmath.mpf(11) / 5898240, 3),
        (12, mpmath.mpf(1) / 2038431744, 4),
    ),
)


def _psi_series(degree: int) -> list:
    """Taylor coefficients of Psi(1/2 + x) = -cos(2 pi x^2 - 5 pi/8) / cos(2 pi x)."""
    pi = mpmath.pi
    a = mpmath.cos(5 * pi / 8)
    b = mpmath.sin(5 * pi / 8)
    num = [mpmath.mpf(0)] * (degree + 1)
    # cos(2 pi x^2 - 5pi/8) = a cos(2 pi x^2) + b sin(2 pi x^2)
    for j in range(0, degree // 2 + 1):
        term = (2 * pi) ** j / mpmath.factorial(j)
        if j % 2 == 0:
            num[2 * j] += a * term * (-1) ** (j // 2)
        else:
            num[2 * j] += b * term * (-1) ** (j // 2)
    den = [mpmath.mpf(0)] * (degree + 1)
    for j in range(0, degree // 2 + 1):
        den[2 * j] = (-1) ** j * (2 * pi) ** (2 * j) / mpmath.factorial(2 * j)
    out = [mpmath.mpf(0)] * (degree + 1)
    for n in range(degree + 1):
        acc = num[n]
        for j in range(1, n + 1):
            acc -= den[j] * out[n - j]
        out[n] = acc / den[0]
    return [-c for c in out]


def _derivative(series: list, order: int) -> list:
    out = list(series)
    for _ in range(order):
        out = [out[i] * i for i in range(1, len(out))]
    return out


@lru_cache(maxsize=1)
def correction_polynomials() -> tuple[np.ndarray, ...]:
    """Float64 power-series coefficients (ascending in x = p - 1/2) of C_0..C_4."""
    with mpmath.workdps(_DPS):
        psi = _psi_series(_DEGREE + 12)
        keep = _DEGREE - 12
        polys = []
        for combo in _COMBINATIONS:
            acc = [mpmath.mpf(0)] * keep
            for order, coeff, pi_power in combo:
                d = _derivative(psi, order)
                scale = coeff / mpmath.pi ** (2 * pi_power)
                for i in range(keep):
                    acc[i] += scale * d[i]
            polys.append(np.array([float(c) for c in acc]))
    return tuple(polys)


def eval_corrections(p: np.ndarray, order: int) -> np.ndarray:
    """Rows C_0(p)..C_order(p) for fractional parts p in [0, 1)."""
    x = np.asarray(p, dtype=float) - 0.5
    polys = correction_polynomials()
    out = np.empty((order + 1,) + x.shape)
    for k in range(order + 1):
        out[k] = np.polynomial.polynomial.polyval(x, polys[k])
    return out

"""Truncated Mellin transform Z_2(s) = int_1^X |zeta(1/2+ix)|^4 x^(-s) dx for Re s > 1.

Two tail bounds for the part beyond X are available.

moment (default): integrating by parts against I_2(x) <= B x log^4 x gives

    |tail| <= sigma B int_X^inf x^(-sigma) log^4 x dx = sigma B Gamma(5, (sigma-1) log X) / (sigma-1)^5

which is finite for every sigma > 1.  B is twice the largest observed value
of I_2(x) / (x log^4 x) on [10, 10^4].  Both constants are calibrated with
the default evaluation policy, whatever policy the transform itself uses.

power: |zeta(1/2+ix)|^4 <= B x^tau gives B X^(1+tau-sigma) / (sigma-1-tau),
finite only for sigma > 1 + tau.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.special import gamma, gammaincc

from .errors import DomainError, TailDiverges
from .moments import _check_T, _propagated, cumulative_moment
from .quadrature import DEFAULT_QUAD, QuadratureSpec, cell_increments, uniform_nodes
from .reduction import tree_sum
from .zeta_eval import DEFAULT_POLICY, EvalPolicy, grid_spacing, zeta_grid

DEFAULT_TAIL_EXPONENT = 0.55
DEFAULT_RHO = 1.5
TAIL_MODES = ("moment", "power")
CALIB_RANGE = (10.0, 1.0e4)
SAFETY = 2.0


@dataclass(frozen=True)
class MellinSpec:
    sigma: float
    t: float = 0.0
    X_trunc: float = 1000.0
    tail_exponent: float = DEFAULT_TAIL_EXPONENT
    tail_mode: str = "moment"

    def __post_init__(self):
        if not self.sigma > 1:
            raise DomainError("the defining integral needs sigma > 1; continuation is not attempted")
        if self.X_trunc < 10:
            raise DomainError("X_trunc must be >= 10")
        if self.tail_mode not in TAIL_MODES:
            raise ValueError(f"unknown tail mode {self.tail_mode!r}")

    @property
    def s(self) -> complex:
        return complex(self.sigma, self.t)


@dataclass(frozen=True)
class MellinResult:
    value: complex
    est_err: float
    tail_bound: float
    evals: int

    @property
    def modulus(self) -> float:
        return abs(self.value)


def _calib_grid(lo: float, hi: float, policy: EvalPolicy):
    h, n = uniform_nodes(lo, hi, grid_spacing(hi, DEFAULT_QUAD.spacing_c))
    return zeta_grid(lo, h, n, policy)


@lru_cache(maxsize=1)
def moment_tail_constant() -> float:
    """B with I_2(x) <= B x log^4 x, from the calibration range with a safety factor."""
    lo, hi = CALIB_RANGE
    F = cumulative_moment(2, hi)
    x = np.geomspace(lo, hi, 400)
    return SAFETY * float(np.max(F(x) / (x * np.log(x) ** 4)))


@lru_cache(maxsize=8)
def power_tail_constant(tau: float) -> float:
    """B with |zeta(1/2+ix)|^4 <= B x^tau on the calibration range, with a safety factor."""
    g = _calib_grid(*CALIB_RANGE, DEFAULT_POLICY)
    return SAFETY * float(np.max(g.abs_power(2) / g.t**tau))


def tail_bound(spec: MellinSpec) -> float:
    sigma, X = spec.sigma, spec.X_trunc
    if spec.tail_mode == "power":
        tau = spec.tail_exponent
        if sigma <= 1 + tau:
            raise TailDiverges(f"power-law tail needs sigma > 1 + tail_exponent = {1 + tau:g}")
        return power_tail_constant(tau) * X ** (1 + tau - sigma) / (sigma - 1 - tau)
    a = sigma - 1
    upper_gamma = gamma(5) * gammaincc(5, a * math.log(X))
    return sigma * moment_tail_constant() * upper_gamma / a**5


def _grid(X: float, t_max: float, q: QuadratureSpec, policy: EvalPolicy):
    _check_T(X)
    # the factor x^(-it) turns over on the scale x / |t| >= 1 / |t|
    h_max = min(grid_spacing(X, q.spacing_c), 0.25 / max(abs(t_max), 1.0))
    h, n = uniform_nodes(1.0, X, h_max)
    return zeta_grid(1.0, h, n, policy)


def _weights(n: int, h: float) -> np.ndarray:
    """Quadrature weights of the corrected trapezoid rule (the rule is linear in f)."""
    w = np.zeros(n)
    e = np.zeros(n)
    for j in range(min(n, 4)):
        e[:] = 0.0
        e[j] = 1.0
        w[j] = cell_increments(e, h).sum()
        e[j] = 0.0
        e[n - 1 - j] = 1.0
        w[n - 1 - j] = cell_increments(e, h).sum()
    if n > 8:
        w[4:-4] = h
    return w


def _transform(grid, sigma: float, ts: np.ndarray, stride: int = 1) -> np.ndarray:
    x = grid.t[::stride]
    h = grid.h * stride
    f = grid.abs_power(2)[::stride] * x**-sigma
    w = _weights(x.size, h) * f
    phase = np.exp(-1j * np.outer(ts, np.log(x)))
    return np.array([tree_sum(row.real) + 1j * tree_sum(row.imag) for row in phase * w])


def z2_eval(spec: MellinSpec, q: QuadratureSpec = DEFAULT_QUAD, policy: EvalPolicy = DEFAULT_POLICY) -> MellinResult:
    """int_1^X |zeta(1/2+ix)|^4 x^(-s) dx; est_err adds quadrature, propagated and tail errors."""
    tb = tail_bound(spec)
    grid = _grid(spec.X_trunc, spec.t, q, policy)
    ts = np.array([spec.t])
    fine = complex(_transform(grid, spec.sigma, ts)[0])
    coarse = complex(_transform(grid, spec.sigma, ts, 2)[0])
    prop = _propagated(grid, 2.0, grid.h)
    return MellinResult(fine, abs(fine - coarse) + prop + tb, tb, grid.t.size)


@dataclass(frozen=True)
class MeanSquareScan:
    sigma: float
    t: np.ndarray
    z2_abs2: np.ndarray
    partial: np.ndarray
    slope: float
    tail_bound: float


def z2_meansq_scan(
    sigma: float,
    T_lo: float = 1.0,
    T_hi: float = 50.0,
    steps: int = 200,
    q: QuadratureSpec = DEFAULT_QUAD,
    policy: EvalPolicy = DEFAULT_POLICY,
    X_trunc: float = 1000.0,
) -> MeanSquareScan:
    """|Z_2(sigma+it)|^2 on a t grid, its running integral from T_lo, and the log-log slope of the latter."""
    if not 0 < T_lo < T_hi:
        raise DomainError("need 0 < T_lo < T_hi")
    if steps < 4:
        raise DomainError("steps must be >= 4")
    spec = MellinSpec(sigma, 0.0, X_trunc)
    tb = tail_bound(spec)
    ts = np.linspace(T_lo, T_hi, steps)
    grid = _grid(X_trunc, T_hi, q, policy)
    vals = np.abs(_transform(grid, sigma, ts)) ** 2
    dt = ts[1] - ts[0]
    partial = np.concatenate(([0.0], np.cumsum(0.5 * dt * (vals[1:] + vals[:-1]))))
    keep = slice(steps // 4, None)
    slope = float(np.polyfit(np.log(ts[keep]), np.log(partial[keep]), 1)[0])
    return MeanSquareScan(sigma, ts, vals, partial, slope, tb)


def fit_tail_exponent(
    x_lo: float = 1e2, x_hi: float = 1e4, windows: int = 40, width: float = 50.0, policy: EvalPolicy = DEFAULT_POLICY
) -> float:
    """Slope of log max |zeta(1/2+ix)|^4 against log x.

    Maxima are taken over windows of fixed width centred at geometrically
    spaced points, so longer stretches do not bias the peaks upward.
    """
    g = _calib_grid(x_lo, x_hi, policy)
    f = g.abs_power(2)
    centres = np.geomspace(x_lo + width, x_hi - width, windows)
    a = np.searchsorted(g.t, centres - width / 2)
    b = np.searchsorted(g.t, centres + width / 2)
    peaks = np.array([f[i:j].max() for i, j in zip(a, b)])
    return float(np.polyfit(np.log(centres), np.log(peaks), 1)[0])


def growth_exponent(sigma: float, rho: float = DEFAULT_RHO) -> float:
    """(4 rho + 4 - 8 sigma) / (3 rho - 1): the growth exponent of the mean square of Z_2 (reported only)."""
    return (4 * rho + 4 - 8 * sigma) / (3 * rho - 1)

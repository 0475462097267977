"""Evaluation of zeta(1/2 + it) and of |zeta(1/2 + it)|^(2k) on grids.

Two evaluators are available:

* Euler-Maclaurin summation, valid for any height, with an explicit
  remainder bound; cost grows linearly with t.
* The Riemann-Siegel formula for Z(t) with up to four correction terms,
  ``zeta(1/2 + it) = exp(-i theta(t)) Z(t)``; cost grows like sqrt(t).

Truncation bounds for Riemann-Siegel use the constants of Gabcke's
remainder estimate ``|R_K(t)| <= c_K t^(-(2K+3)/4)``, raised slightly
where our own comparison with mpmath on [30, 200] exceeded them.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import mpmath
import numpy as np

from .errors import BudgetExceeded, UnsupportedHeight
from .quadrature import uniform_nodes
from .reduction import blocks, get_precision, parallel_map, two_prod, two_sum
from .rs_coeffs import eval_corrections

EPS = np.finfo(float).eps
TWO_PI = 2.0 * math.pi

# Riemann-Siegel remainder constants for correction orders 0..4
RS_CONSTANTS = (0.13, 0.055, 0.013, 0.032, 0.017)
RS_MIN_HEIGHT = 30.0
EM_CROSSOVER = 30.0
DD_THRESHOLD = 1.0e6

METHODS = ("euler_maclaurin", "riemann_siegel", "auto")


@dataclass(frozen=True)
class EvalPolicy:
    method: str = "auto"
    target_abs_err: float = 1e-6
    rs_correction_order: int = 2

    def __post_init__(self):
        if self.method not in METHODS:
            raise ValueError(f"unknown method {self.method!r}")
        if not self.target_abs_err > 0:
            raise ValueError("target_abs_err must be positive")
        if not 0 <= self.rs_correction_order <= 4:
            raise ValueError("rs_correction_order must lie in [0, 4]")


DEFAULT_POLICY = EvalPolicy()


@dataclass(frozen=True)
class CriticalSample:
    t: float
    value: complex
    abs2k: float
    err_bound: float
    k: float = 1.0


# --------------------------------------------------------------------------
# Euler-Maclaurin
# --------------------------------------------------------------------------

_EM_TERMS = 16
_BERNOULLI = [float(mpmath.bernoulli(2 * j) / mpmath.factorial(2 * j)) for j in range(1, _EM_TERMS + 2)]


def zeta_em(s, n_terms: int | None = None):
    """Euler-Maclaurin zeta(s) for an array of complex s (Re s > -10).

    Returns (values, error_bounds).  A single cutoff N is used for the
    whole array so the result is independent of how points are batched
    only through N; callers that need batch independence pass n_terms.
    """
    s = np.atleast_1d(np.asarray(s, dtype=complex))
    if n_terms is None:
        n_terms = 20 + int(np.max(np.abs(s.imag)) / math.pi)
    N = int(n_terms)
    n = np.arange(1, N, dtype=float)
    logn = np.log(n)
    head = np.exp(-np.outer(s, logn))
    total = head.sum(axis=1)
    abs_head = np.abs(head).sum(axis=1)
    logN = math.log(N)
    NmS = np.exp(-s * logN)
    total = total + N * NmS / (s - 1.0) + 0.5 * NmS
    # sum_j B_2j/(2j)! s(s+1)...(s+2j-2) N^(-s-2j+1)
    rising = s.copy()
    power = NmS / N
    last = None
    for j in range(1, _EM_TERMS + 1):
        term = _BERNOULLI[j - 1] * rising * power
        total = total + term
        rising = rising * (s + 2 * j - 1) * (s + 2 * j)
        power = power / (N * N)
        last = j
    nxt = _BERNOULLI[last] * rising * power
    sigma = s.real
    k = 2 * _EM_TERMS + 1
    remainder = np.abs(nxt) * np.abs(s + k) / np.maximum(sigma + k, 1.0)
    err = remainder + 8 * EPS * (abs_head + np.abs(N * NmS / (s - 1.0)) + 1.0)
    return total, err


# --------------------------------------------------------------------------
# Riemann-Siegel
# --------------------------------------------------------------------------


def theta(t):
    """Riemann-Siegel theta function by its asymptotic series (t >= 10)."""
    t = np.asarray(t, dtype=float)
    return (
        0.5 * t * np.log(t / TWO_PI)
        - 0.5 * t
        - math.pi / 8
        + 1.0 / (48.0 * t)
        + 7.0 / (5760.0 * t**3)
        + 31.0 / (80640.0 * t**5)
        + 127.0 / (430080.0 * t**7)
    )


@lru_cache(maxsize=None)
def _log_dd(n: int) -> tuple[float, float]:
    with mpmath.workdps(40):
        v = mpmath.log(n)
        hi = float(v)
        lo = float(v - hi)
    return hi, lo


def _theta_dd(t: float) -> tuple[float, float]:
    with mpmath.workdps(40):
        tt = mpmath.mpf(t)
        v = tt / 2 * mpmath.log(tt / (2 * mpmath.pi)) - tt / 2 - mpmath.pi / 8 + 1 / (48 * tt) + 7 / (5760 * tt**3)
        hi = float(v)
        lo = float(v - hi)
    return hi, lo


with mpmath.workdps(40):
    _TWO_PI_HI = float(2 * mpmath.pi)
    _TWO_PI_LO = float(2 * mpmath.pi - mpmath.mpf(_TWO_PI_HI))


def _reduced_theta_dd(t: float) -> float:
    hi, lo = _theta_dd(t)
    q = round((hi + lo) / _TWO_PI_HI)
    m_hi, m_lo = two_prod(float(q), _TWO_PI_HI)
    m_lo = m_lo + q * _TWO_PI_LO
    r_hi, r_lo = two_sum(hi, -m_hi)
    return r_hi + (r_lo + lo - m_lo)


def _phases_dd(t: float, N: int) -> np.ndarray:
    """theta(t) - t log n for n = 1..N, reduced mod 2 pi in double-double."""
    n = np.arange(1, N + 1)
    lhi = np.array([_log_dd(int(k))[0] for k in n])
    llo = np.array([_log_dd(int(k))[1] for k in n])
    th_hi, th_lo = _theta_dd(t)
    p_hi, p_lo = two_prod(np.full(N, t), lhi)
    p_lo = p_lo + t * llo
    s_hi, s_lo = two_sum(th_hi, -p_hi)
    s_lo = s_lo + th_lo - p_lo
    q = np.round((s_hi + s_lo) / _TWO_PI_HI)
    m_hi, m_lo = two_prod(q, np.full(N, _TWO_PI_HI))
    m_lo = m_lo + q * _TWO_PI_LO
    r_hi, r_lo = two_sum(s_hi, -m_hi)
    return r_hi + (r_lo + s_lo - m_lo)


def _rs_block(t: np.ndarray, order: int, dd: bool):
    a = np.sqrt(t / TWO_PI)
    N = np.floor(a).astype(int)
    p = a - N
    nmax = int(N.max())
    n = np.arange(1, nmax + 1, dtype=float)
    inv_sqrt = 1.0 / np.sqrt(n)
    mask = n[None, :] <= N[:, None]
    th = theta(t)
    if dd:
        phase = np.zeros((t.size, nmax))
        for i, (ti, Ni) in enumerate(zip(t, N)):
            phase[i, :Ni] = _phases_dd(float(ti), int(Ni))
        th = np.array([_reduced_theta_dd(float(ti)) for ti in t])
    else:
        phase = th[:, None] - t[:, None] * np.log(n)[None, :]
    terms = np.where(mask, np.cos(phase) * inv_sqrt[None, :], 0.0)
    main = 2.0 * terms.sum(axis=1)
    C = eval_corrections(p, order)
    corr = np.zeros_like(t)
    for k in range(order, -1, -1):
        corr = corr / a + C[k]
    sign = np.where(N % 2 == 1, 1.0, -1.0)
    Z = main + sign * a**-0.5 * corr
    trunc = RS_CONSTANTS[order] * t ** (-(2 * order + 3) / 4.0)
    phase_err = 0.0 if dd else EPS * (np.abs(th) + t * np.log(np.maximum(N, 1)) + 1.0)
    rounding = 4.0 * np.sqrt(N) * (phase_err + 8 * EPS)
    # rotation by exp(-i theta) with a rounded theta
    rotation = np.abs(Z) * (8 * EPS if dd else EPS * (np.abs(th) + 1.0))
    return Z, th, trunc + rounding + rotation


def rs_bound(t, order: int):
    """Truncation part of the Riemann-Siegel error bound."""
    t = np.asarray(t, dtype=float)
    return RS_CONSTANTS[order] * t ** (-(2 * order + 3) / 4.0)


def zeta_rs(t, order: int = 2, precision: str | None = None):
    """zeta(1/2 + it) for t >= 30 by Riemann-Siegel; returns (values, err, Z)."""
    t = np.atleast_1d(np.asarray(t, dtype=float))
    if np.any(t < RS_MIN_HEIGHT):
        raise UnsupportedHeight(f"Riemann-Siegel evaluation needs t >= {RS_MIN_HEIGHT}")
    precision = precision or get_precision()
    dd = (t > DD_THRESHOLD) if precision == "f64" else np.ones(t.shape, bool)
    Z = np.empty_like(t)
    th = np.empty_like(t)
    err = np.empty_like(t)
    for use_dd in (False, True):
        sel = dd == use_dd
        if np.any(sel):
            Z[sel], th[sel], err[sel] = _rs_block(t[sel], order, use_dd)
    values = Z * np.exp(-1j * th)
    return values, err, Z


# --------------------------------------------------------------------------
# policy dispatch
# --------------------------------------------------------------------------


def _rs_order_for(t: np.ndarray, policy: EvalPolicy) -> np.ndarray:
    """Smallest order >= the configured one whose bound meets the target; -1 if none."""
    order = np.full(t.shape, -1)
    for k in range(4, policy.rs_correction_order - 1, -1):
        ok = rs_bound(np.maximum(t, RS_MIN_HEIGHT), k) <= 0.5 * policy.target_abs_err
        order = np.where(ok, k, order)
    return order


def _eval_nonneg(t: np.ndarray, policy: EvalPolicy):
    values = np.empty(t.shape, dtype=complex)
    err = np.empty(t.shape)
    if policy.method == "euler_maclaurin":
        use_em = np.ones(t.shape, bool)
        orders = np.full(t.shape, -1)
    elif policy.method == "riemann_siegel":
        if np.any(t < RS_MIN_HEIGHT):
            raise UnsupportedHeight(f"Riemann-Siegel evaluation needs t >= {RS_MIN_HEIGHT}")
        use_em = np.zeros(t.shape, bool)
        orders = np.full(t.shape, policy.rs_correction_order)
    else:
        orders = _rs_order_for(t, policy)
        use_em = (t < EM_CROSSOVER) | (orders < 0)
    if np.any(use_em):
        tt = t[use_em]
        v, e = zeta_em(0.5 + 1j * tt)
        values[use_em] = v
        err[use_em] = e
    for k in np.unique(orders[~use_em]):
        sel = (~use_em) & (orders == k)
        v, e, _ = zeta_rs(t[sel], int(k))
        values[sel] = v
        err[sel] = e
    values[t == 0] = values[t == 0].real
    bad = err > policy.target_abs_err
    if np.any(bad):
        where = float(t[bad][0])
        hint = "loosen target_abs_err" if policy.method == "auto" else "raise rs_correction_order or use auto"
        raise UnsupportedHeight(
            f"{policy.method} cannot reach abs error {policy.target_abs_err:g} at t={where:g} "
            f"(bound {float(err[bad][0]):.3g}); {hint}"
        )
    return values, err


def zeta_half_array(t, policy: EvalPolicy = DEFAULT_POLICY):
    """Vectorised zeta(1/2 + it); negative t handled by conjugation."""
    t = np.atleast_1d(np.asarray(t, dtype=float))
    values, err = _eval_nonneg(np.abs(t), policy)
    values = np.where(t < 0, np.conj(values), values)
    return values, err


def eval_zeta_half(t: float, policy: EvalPolicy = DEFAULT_POLICY, k: float = 1.0) -> CriticalSample:
    values, err = zeta_half_array([t], policy)
    v = complex(values[0])
    abs2 = v.real * v.real + v.imag * v.imag
    return CriticalSample(t=float(t), value=v, abs2k=abs2**k, err_bound=float(err[0]), k=k)


# --------------------------------------------------------------------------
# grids
# --------------------------------------------------------------------------

DEFAULT_SPACING_C = 0.125


def zero_gap(t: float) -> float:
    """Mean spacing of zeros near height t, floored for small t."""
    return TWO_PI / max(math.log(max(t, 1.0) / TWO_PI), 1.0)


def grid_spacing(t1: float, c: float = DEFAULT_SPACING_C) -> float:
    if not 0 < c <= 0.25:
        raise ValueError("spacing constant c must lie in (0, 1/4]")
    return c * zero_gap(t1)


@dataclass(frozen=True)
class ZetaGrid:
    """zeta(1/2 + it) on the uniform nodes t0 + i*h, i = 0..n-1 (read-only)."""

    t0: float
    h: float
    t: np.ndarray
    values: np.ndarray
    err: np.ndarray

    @property
    def abs2(self) -> np.ndarray:
        v = self.values
        return v.real * v.real + v.imag * v.imag

    def abs_power(self, k: float) -> np.ndarray:
        """|zeta|^(2k) at the nodes."""
        a = self.abs2
        return a if k == 1 else a**k


def _build_grid(t0: float, h: float, n: int, policy: EvalPolicy) -> ZetaGrid:
    t = t0 + h * np.arange(n)
    parts = parallel_map(lambda sl: zeta_half_array(t[sl], policy), blocks(n))
    values = np.concatenate([p[0] for p in parts])
    err = np.concatenate([p[1] for p in parts])
    for arr in (t, values, err):
        arr.setflags(write=False)
    return ZetaGrid(t0=t0, h=h, t=t, values=values, err=err)


@lru_cache(maxsize=16)
def _cached_grid(t0: float, h: float, n: int, policy: EvalPolicy, precision: str) -> ZetaGrid:
    return _build_grid(t0, h, n, policy)


def zeta_grid(t0: float, h: float, n: int, policy: EvalPolicy = DEFAULT_POLICY, max_points: int | None = None) -> ZetaGrid:
    """Cached uniform grid of zeta values; identical arguments give the same object."""
    if max_points is not None and n > max_points:
        raise BudgetExceeded(f"grid needs {n} points, budget is {max_points}")
    return _cached_grid(float(t0), float(h), int(n), policy, get_precision())


def abs_power_grid(
    t0: float,
    t1: float,
    k: float,
    policy: EvalPolicy = DEFAULT_POLICY,
    max_points: int = 1_000_000,
    c: float = 0.25,
) -> list[CriticalSample]:
    """Samples of |zeta(1/2+it)|^(2k) covering [t0, t1] at the zero-gap spacing rule."""
    if not 0 <= t0 < t1:
        raise ValueError("need 0 <= t0 < t1")
    h, n = uniform_nodes(t0, t1, grid_spacing(t1, c))
    if n > max_points:
        raise BudgetExceeded(f"spacing rule needs {n} points over [{t0}, {t1}], budget is {max_points}")
    g = zeta_grid(t0, h, n, policy)
    a = g.abs_power(k)
    return [
        CriticalSample(t=float(ti), value=complex(v), abs2k=float(ak), err_bound=float(e), k=k)
        for ti, v, ak, e in zip(g.t, g.values, a, g.err)
    ]

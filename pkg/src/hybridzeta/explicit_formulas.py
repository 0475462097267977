"""Main-term polynomials, moment error terms and the explicit series for J_1(T, G).

The explicit series is

    J_1(T, G) = M(T, G) + sqrt(2) sum_n (-1)^n d(n) n^(-1/2)
                  ((T/2 pi n + 1/4)^(1/2) - 1/2)^(-1/2) exp(-G^2 arsinh^2 sqrt(pi n / 2T)) sin f(T, n)
                + O(log T)

where M is the Gaussian average of Re psi(1/2 + it) + 2 gamma - log 2 pi and
f(T, n) = 2T arsinh sqrt(pi n / 2T) + sqrt(2 pi n T + pi^2 n^2) - pi/4.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .digamma import digamma
from .divisor_arith import EULER_GAMMA, TWO_GAMMA_MINUS_ONE, DivisorTable, delta_star, divisor_main_term
from .errors import DomainError, IllConditioned, TableTooSmall
from .moments import SQRT_PI, cumulative_moment, smoothed_J
from .quadrature import DEFAULT_QUAD, QuadratureSpec
from .reduction import tree_sum
from .zeta_eval import DEFAULT_POLICY, EvalPolicy

LOG_TWO_PI = math.log(2 * math.pi)
P4_LEADING = 1.0 / (2 * math.pi**2)
MAX_CONDITION = 1e12
PROVENANCES = ("exact", "leading_fixed_rest_fitted")


# --------------------------------------------------------------------------
# main terms
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class MainTermPolynomial:
    """P(y) = sum_j coeffs[j] y^j of degree k^2, with I_k(T) ~ T P(log T)."""

    k: int
    coeffs: tuple
    provenance: str = "exact"
    fit_residual: float | None = None

    def __post_init__(self):
        if self.provenance not in PROVENANCES:
            raise ValueError(f"unknown provenance {self.provenance!r}")
        if len(self.coeffs) != self.k * self.k + 1:
            raise ValueError(f"degree must be k^2 = {self.k * self.k}")

    @property
    def degree(self) -> int:
        return self.k * self.k

    def __call__(self, y):
        return np.polynomial.polynomial.polyval(y, np.asarray(self.coeffs, dtype=float))


P1 = MainTermPolynomial(1, (TWO_GAMMA_MINUS_ONE - LOG_TWO_PI, 1.0))


def eval_main_term(poly: MainTermPolynomial, T):
    """T P(log T)."""
    T = np.asarray(T, dtype=float)
    if np.any(T < 2):
        raise DomainError("main term needs T >= 2")
    out = T * poly(np.log(T))
    return out[()] if out.ndim == 0 else out


def fit_P4(
    calib_range: tuple[float, float],
    sample_count: int = 40,
    q: QuadratureSpec = DEFAULT_QUAD,
    policy: EvalPolicy = DEFAULT_POLICY,
) -> MainTermPolynomial:
    """Least-squares fit of the lower coefficients of P_4 with the leading one pinned.

    Fits I_2(T) - T (log T)^4 / (2 pi^2) against T (log T)^j, j = 0..3, on
    ``sample_count`` equally spaced points.  The conditioning check is done
    on the column-scaled normal matrix.
    """
    lo, hi = calib_range
    if lo < 500 or not hi > lo:
        raise DomainError("need 500 <= T_lo < T_hi")
    if sample_count < 20:
        raise DomainError("sample_count must be >= 20")
    F = cumulative_moment(2, hi, q, policy)
    T = np.linspace(lo, hi, sample_count)
    y = np.log(T)
    rhs = F(T) - T * y**4 * P4_LEADING
    A = T[:, None] * y[:, None] ** np.arange(4)
    scale = np.linalg.norm(A, axis=0)
    As = A / scale
    cond = np.linalg.cond(As.T @ As)
    if not np.isfinite(cond) or cond > MAX_CONDITION:
        raise IllConditioned(f"normal equations have condition number {cond:.3g}; widen the calibration range")
    sol, *_ = np.linalg.lstsq(As, rhs, rcond=None)
    coeffs = tuple(float(c) for c in sol / scale) + (P4_LEADING,)
    resid = float(np.max(np.abs(rhs - A @ (sol / scale))))
    return MainTermPolynomial(2, coeffs, "leading_fixed_rest_fitted", resid)


# --------------------------------------------------------------------------
# error terms
# --------------------------------------------------------------------------

ERROR_KINDS = ("E", "E2", "Estar")


@dataclass(frozen=True)
class ErrorTermSample:
    """value = moment - main - correction, where correction = 2 pi Delta*(T / 2 pi) for Estar, else 0."""

    T: float
    kind: str
    value: float
    components: tuple

    @property
    def moment(self) -> float:
        return self.components[0]

    @property
    def main(self) -> float:
        return self.components[1]

    @property
    def correction(self) -> float:
        return self.components[2]


def _error_parts(kind: str, T: np.ndarray, poly: MainTermPolynomial | None, table: DivisorTable | None, F):
    if kind not in ERROR_KINDS:
        raise ValueError(f"unknown error-term kind {kind!r}")
    want = 2 if kind == "E2" else 1
    if poly is None:
        if want == 2:
            raise DomainError("E2 needs a fitted P4")
        poly = P1
    if poly.k != want:
        raise DomainError(f"kind {kind} needs a degree-{want * want} main term")
    corr = np.zeros_like(T)
    if kind == "Estar":
        if table is None:
            raise TableTooSmall("Estar needs a divisor table")
        corr = 2 * math.pi * np.asarray(delta_star(T / (2 * math.pi), table), dtype=float)
    return F(T), eval_main_term(poly, T), corr


def error_term(
    kind: str,
    T: float,
    poly: MainTermPolynomial | None = None,
    q: QuadratureSpec = DEFAULT_QUAD,
    table: DivisorTable | None = None,
    policy: EvalPolicy = DEFAULT_POLICY,
) -> ErrorTermSample:
    """E(T), E_2(T) or E*(T), keeping the pieces it was computed from."""
    if T < 2:
        raise DomainError("T must be >= 2")
    k = 2 if kind == "E2" else 1
    F = cumulative_moment(k, T, q, policy)
    m, main, corr = (float(v) for v in _error_parts(kind, np.asarray(T, dtype=float), poly, table, F))
    return ErrorTermSample(float(T), kind, m - main - corr, (m, main, corr))


def error_term_scan(
    kind: str,
    T,
    poly: MainTermPolynomial | None = None,
    q: QuadratureSpec = DEFAULT_QUAD,
    table: DivisorTable | None = None,
    policy: EvalPolicy = DEFAULT_POLICY,
) -> list[ErrorTermSample]:
    """error_term at many heights from a single prefix integral."""
    T = np.asarray(T, dtype=float)
    if np.any(T < 2):
        raise DomainError("T must be >= 2")
    k = 2 if kind == "E2" else 1
    F = cumulative_moment(k, float(T.max()), q, policy)
    m, main, corr = _error_parts(kind, T, poly, table, F)
    m, main, corr = (np.atleast_1d(a) for a in (m, main, corr))
    return [
        ErrorTermSample(float(t), kind, float(a - b - c), (float(a), float(b), float(c)))
        for t, a, b, c in zip(T, m, main, corr)
    ]


# --------------------------------------------------------------------------
# phase and explicit series
# --------------------------------------------------------------------------


def arsinh(z):
    """arsinh(z) for z >= 0: log(z + sqrt(z^2 + 1)), with a Taylor series below 1e-4."""
    z = np.asarray(z, dtype=float)
    z2 = z * z
    small = z * (1.0 - z2 / 6.0 + 3.0 * z2 * z2 / 40.0)
    big = np.log(z + np.sqrt(z2 + 1.0))
    out = np.where(z < 1e-4, small, big)
    return out[()] if out.ndim == 0 else out


def f_phase(T: float, n):
    """f(T, n) = 2T arsinh sqrt(pi n / 2T) + sqrt(2 pi n T + pi^2 n^2) - pi/4."""
    n = np.asarray(n, dtype=float)
    if np.any(n < 1) or np.any(n > T):
        raise DomainError("need 1 <= n <= T")
    out = 2 * T * arsinh(np.sqrt(math.pi * n / (2 * T))) + np.sqrt(2 * math.pi * n * T + (math.pi * n) ** 2) - math.pi / 4
    return out[()] if out.ndim == 0 else out


KERNEL_MODES = ("exact", "simplified")


@dataclass(frozen=True)
class ExplicitSeriesResult:
    T: float
    G: float
    n_max: int
    main_term: float
    oscillating_sum: float
    terms: np.ndarray
    kernel_mode: str


def default_cutoff(T: float, G: float) -> int:
    return int(math.ceil(T * math.log(T) / (G * G)))


def series_envelope(T: float, n) -> np.ndarray:
    """sqrt(2) n^(-1/2) ((T/2 pi n + 1/4)^(1/2) - 1/2)^(-1/2): |term(n)| <= d(n) times this."""
    n = np.asarray(n, dtype=float)
    return math.sqrt(2) * n**-0.5 * (np.sqrt(T / (2 * math.pi * n) + 0.25) - 0.5) ** -0.5


def digamma_main_term(T: float, G: float, nodes: int = 257) -> float:
    """(1/(sqrt(pi) G)) int [Re psi(1/2+it) + 2 gamma - log 2 pi] exp(-(T-t)^2/G^2) dt + 2 pi Re g(i/2).

    The integrand is smooth on the scale G, so the trapezoid rule over
    |t - T| <= 8G is exact to rounding.  g(t) is the Gaussian weight itself.
    """
    u = np.linspace(-8 * G, 8 * G, nodes)
    h = u[1] - u[0]
    f = digamma(0.5 + 1j * (T + u)).real + 2 * EULER_GAMMA - LOG_TWO_PI
    integral = h * float(tree_sum(f * np.exp(-((u / G) ** 2)))) / (SQRT_PI * G)
    g = np.exp(-((T - 0.5j) ** 2) / (G * G)) / (SQRT_PI * G)
    return integral + 2 * math.pi * float(np.real(g))


def atkinson_series_J1(
    T: float,
    G: float,
    table: DivisorTable,
    kernel_mode: str = "exact",
    n_max_override: int | None = None,
) -> ExplicitSeriesResult:
    """Digamma main term plus the truncated oscillating series for J_1(T, G)."""
    if kernel_mode not in KERNEL_MODES:
        raise ValueError(f"unknown kernel mode {kernel_mode!r}")
    if not 2 <= G <= T**0.9:
        raise DomainError(f"need 2 <= G <= T^0.9, got G = {G:g}")
    n_max = default_cutoff(T, G) if n_max_override is None else int(n_max_override)
    if n_max < 1 or n_max > T:
        raise DomainError("cutoff must lie in [1, T]")
    if n_max > table.limit:
        raise TableTooSmall(f"series needs d(n) up to {n_max}, table holds {table.limit}")
    n = np.arange(1, n_max + 1, dtype=float)
    sign = np.where(n % 2 == 0, 1.0, -1.0)
    if kernel_mode == "exact":
        kern = (np.sqrt(T / (2 * math.pi * n) + 0.25) - 0.5) ** -0.5 * np.exp(-(G * arsinh(np.sqrt(math.pi * n / (2 * T)))) ** 2)
    else:
        kern = (T / (2 * math.pi * n)) ** -0.25 * np.exp(-math.pi * G * G * n / (2 * T))
    terms = math.sqrt(2) * sign * table.d[1 : n_max + 1] * n**-0.5 * kern * np.sin(f_phase(T, n))
    return ExplicitSeriesResult(
        float(T), float(G), n_max, digamma_main_term(T, G), float(tree_sum(terms)), terms, kernel_mode
    )


def j1_residual(
    T: float,
    G: float,
    table: DivisorTable,
    q: QuadratureSpec = DEFAULT_QUAD,
    policy: EvalPolicy = DEFAULT_POLICY,
    n_max_override: int | None = None,
) -> float:
    """Directly computed J_1(T, G) minus the main term and the truncated series."""
    s = atkinson_series_J1(T, G, table, "exact", n_max_override)
    return smoothed_J(1, T, G, q, policy).value - s.main_term - s.oscillating_sum


# --------------------------------------------------------------------------
# J_1 through E*
# --------------------------------------------------------------------------


def j1_from_estar(
    t: float,
    G: float,
    table: DivisorTable,
    poly: MainTermPolynomial = P1,
    q: QuadratureSpec = DEFAULT_QUAD,
    policy: EvalPolicy = DEFAULT_POLICY,
    nodes: int = 20001,
    estar=None,
) -> float:
    """(2/(sqrt(pi) G^3)) int x E*(t+x) exp(-(x/G)^2) dx over |x| <= G log t.

    ``estar`` replaces E* by a given function of the height (trapezoid rule
    only), which is how the odd-weight property is audited.

    E* = [I_1 - T P_1(log T) + 2 pi D(T/2 pi)] - pi A(2T/pi), where D is the
    smooth divisor main term and A the alternating prefix sum of d(n).  The
    bracket is integrated by the trapezoid rule; A is a step function with
    jumps at T = pi n / 2, integrated exactly using the antiderivative
    -(G^2/2) exp(-(x/G)^2) of the weight.
    """
    if poly.k != 1:
        raise DomainError("j1_from_estar needs P1")
    if not 1 <= G <= t ** (1 / 3) * (1 + 1e-12):
        raise DomainError(f"need 1 <= G <= t^(1/3), got G = {G:g}")
    L = G * math.log(t)
    a, b = t - L, t + L
    x = np.linspace(-L, L, nodes)
    w = x * np.exp(-((x / G) ** 2))
    h = x[1] - x[0]
    if estar is not None:
        fw = np.asarray(estar(t + x), dtype=float) * w
        return 2.0 / (SQRT_PI * G**3) * h * float(tree_sum(fw[1:-1]) + 0.5 * (fw[0] + fw[-1]))
    n0, n1 = int(math.floor(2 * a / math.pi)), int(math.floor(2 * b / math.pi))
    if n1 > table.limit:
        raise TableTooSmall(f"E* needs d(n) up to {n1}, table holds {table.limit}")
    F = cumulative_moment(1, b, q, policy)
    u = t + x
    smooth = F(u) - eval_main_term(poly, u) + 2 * math.pi * divisor_main_term(u / (2 * math.pi))
    fw = smooth * w
    smooth_int = h * float(tree_sum(fw[1:-1]) + 0.5 * (fw[0] + fw[-1]))
    edges = np.concatenate(([a], math.pi * np.arange(n0 + 1, n1 + 1) / 2, [b]))
    W = -0.5 * G * G * np.exp(-(((edges - t) / G) ** 2))
    step_int = -math.pi * float(tree_sum(table.alt_prefix[n0 : n1 + 1] * np.diff(W)))
    return 2.0 / (SQRT_PI * G**3) * (smooth_int + step_int)

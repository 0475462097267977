"""Mean square of E(x + U) - E(x) over [T, T + H], directly and through its divisor series.

For the divisor error term Delta the series side is

    (1 / 4 pi^2) sum_{n <= T/2U} d(n)^2 n^(-3/2) int_T^{T+H} x^(1/2) |exp(2 pi i U sqrt(n/x)) - 1|^2 dx.

Since E(t) is approximately 2 pi Delta*(t / 2 pi), and Delta* has the same
Voronoi amplitudes as Delta, the change of variables t = 2 pi x turns this
into the series for E:

    (2 pi)^(-1/2) sum_{n <= T/2U} d(n)^2 n^(-3/2) int_T^{T+H} x^(1/2) |exp(i U sqrt(2 pi n/x)) - 1|^2 dx.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .divisor_arith import DivisorTable, build_divisor_table, divisor_main_term
from .errors import BudgetExceeded, DomainError, TableTooSmall
from .explicit_formulas import P1, eval_main_term
from .moments import _check_T
from .quadrature import DEFAULT_QUAD, MomentResult, PrefixIntegral, QuadratureSpec, integrate_uniform, uniform_nodes
from .reduction import tree_sum
from .zeta_eval import DEFAULT_POLICY, EvalPolicy, grid_spacing, zeta_grid

METHODS = ("direct", "series")
TARGETS = ("E", "Delta")
GL_NODES = 96


@dataclass(frozen=True)
class DiffMeanSquareSpec:
    """Interval [T, T + H] and shift U.

    Strict specs need 2 <= U <= sqrt(T)/2 and H <= 2T; ``strict=False``
    only asks for U > 0 and H > 0 (limits and wider shifts).
    """

    T: float
    H: float
    U: float
    strict: bool = True

    def __post_init__(self):
        if self.T < 10 or self.H <= 0 or self.U <= 0:
            raise DomainError("need T >= 10 and positive H, U")
        if self.strict:
            if not 2 <= self.U <= 0.5 * math.sqrt(self.T):
                raise DomainError(f"need 2 <= U <= sqrt(T)/2, got U = {self.U:g}")
            if self.H > 2 * self.T:
                raise DomainError("need H <= 2T")

    @property
    def cutoff(self) -> int:
        return int(math.floor(self.T / (2 * self.U)))


def _direct(spec: DiffMeanSquareSpec, q: QuadratureSpec, policy: EvalPolicy) -> MomentResult:
    T, H, U = spec.T, spec.H, spec.U
    _check_T(T + H + U)
    h_max = grid_spacing(T + H + U, q.spacing_c)
    if U >= 2 * h_max:
        # nodes land on x + U exactly
        j = int(math.ceil(U / h_max))
        j += j % 2
        h = U / j
    else:
        h = uniform_nodes(T, T + H, h_max)[0]
    n = int(math.ceil((H + U) / h)) + 3
    if n > q.max_evals:
        raise BudgetExceeded(f"{n} zeta evaluations needed, budget is {q.max_evals}")
    grid = zeta_grid(T, h, n, policy)
    F = PrefixIntegral(grid.t0, h, grid.abs2)
    hx, nx = uniform_nodes(T, T + H, h)
    x = T + hx * np.arange(nx)

    def meansq(Fp: PrefixIntegral, stride: int):
        xs = x[::stride]
        d = Fp(xs + U) - Fp(xs) - (eval_main_term(P1, xs + U) - eval_main_term(P1, xs))
        return integrate_uniform(d * d, hx * stride)

    fine = meansq(F, 1)
    coarse = meansq(F.coarse(), 2)
    return MomentResult(fine, abs(fine - coarse), n)


def series_terms(
    spec: DiffMeanSquareSpec, table: DivisorTable, n_max: int | None = None, target: str = "E"
) -> np.ndarray:
    """Summands n = 1..n_max (default T/2U) of the divisor series; all non-negative."""
    if target not in TARGETS:
        raise ValueError(f"unknown target {target!r}")
    n_max = spec.cutoff if n_max is None else int(n_max)
    if n_max > table.limit:
        raise TableTooSmall(f"series needs d(n) up to {n_max}, table holds {table.limit}")
    if n_max < 1:
        return np.zeros(0)
    z, w = np.polynomial.legendre.leggauss(GL_NODES)
    x = spec.T + 0.5 * spec.H * (z + 1.0)
    w = 0.5 * spec.H * w
    n = np.arange(1, n_max + 1, dtype=float)
    if target == "E":
        phase = spec.U * np.sqrt(2 * math.pi * n[:, None] / x[None, :])
        const = 1.0 / math.sqrt(2 * math.pi)
    else:
        phase = 2 * math.pi * spec.U * np.sqrt(n[:, None] / x[None, :])
        const = 1.0 / (4 * math.pi**2)
    # |e^{i phi} - 1|^2 = 4 sin^2(phi / 2)
    inner = (np.sqrt(x) * 4.0 * np.sin(0.5 * phase) ** 2) @ w
    d = table.d[1 : n_max + 1].astype(float)
    return const * d * d * n**-1.5 * inner


def _direct_delta(spec: DiffMeanSquareSpec, table: DivisorTable) -> MomentResult:
    """int (Delta(x+U) - Delta(x))^2 dx exactly between jumps, Gauss-Legendre on each smooth piece."""
    T, H, U = spec.T, spec.H, spec.U
    if int(T + H + U) > table.limit:
        raise TableTooSmall(f"needs d(n) up to {int(T + H + U)}, table holds {table.limit}")
    j1 = np.arange(math.floor(T) + 1, math.floor(T + H) + 1, dtype=float)
    j2 = np.arange(math.floor(T + U) + 1, math.floor(T + H + U) + 1, dtype=float) - U
    edges = np.unique(np.concatenate(([T, T + H], j1, j2[(j2 > T) & (j2 < T + H)])))
    a, b = edges[:-1], edges[1:]
    z, w = np.polynomial.legendre.leggauss(4)
    x = 0.5 * (a + b)[:, None] + 0.5 * (b - a)[:, None] * z[None, :]
    mid = 0.5 * (a + b)
    jumps = table.prefix[np.floor(mid + U).astype(np.int64)] - table.prefix[np.floor(mid).astype(np.int64)]
    diff = jumps[:, None] - (divisor_main_term(x + U) - divisor_main_term(x))
    cells = 0.5 * (b - a) * ((diff * diff) @ w)
    return MomentResult(float(tree_sum(cells)), 0.0, cells.size * 4)


def diff_meansq(
    spec: DiffMeanSquareSpec,
    method: str = "direct",
    q: QuadratureSpec = DEFAULT_QUAD,
    policy: EvalPolicy = DEFAULT_POLICY,
    table: DivisorTable | None = None,
    target: str = "E",
) -> MomentResult:
    """int_T^{T+H} (F(x+U) - F(x))^2 dx for F = E or Delta, directly or from the divisor series."""
    if target not in TARGETS:
        raise ValueError(f"unknown target {target!r}")
    if method not in METHODS:
        raise ValueError(f"unknown method {method!r}")
    if method == "direct":
        if target == "E":
            return _direct(spec, q, policy)
        if table is None:
            table = build_divisor_table(int(spec.T + spec.H + spec.U) + 1)
        return _direct_delta(spec, table)
    if table is None:
        table = build_divisor_table(max(spec.cutoff, 1))
    terms = series_terms(spec, table, target=target)
    return MomentResult(float(tree_sum(terms)), 0.0, terms.size * GL_NODES)


def asymp_scale(T: float, U: float, H: float | None = None) -> float:
    """H U log^3(sqrt(T)/U), with H = T by default."""
    return (T if H is None else H) * U * math.log(math.sqrt(T) / U) ** 3


def asymp_ratio(
    T: float,
    U: float,
    q: QuadratureSpec = DEFAULT_QUAD,
    policy: EvalPolicy = DEFAULT_POLICY,
    H: float | None = None,
) -> float:
    """Direct mean square over [T, T + H] divided by H U log^3(sqrt(T)/U).

    U may run up to (but not including) sqrt(T), where the logarithm vanishes.
    """
    if not 2 <= U < math.sqrt(T):
        raise DomainError(f"need 2 <= U < sqrt(T), got U = {U:g}")
    H = T if H is None else H
    spec = DiffMeanSquareSpec(T, H, U, strict=False)
    return _direct(spec, q, policy).value / asymp_scale(T, U, H)

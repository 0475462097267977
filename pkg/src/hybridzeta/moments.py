"""Power moments, Gaussian-smoothed local moments and hybrid moments of |zeta(1/2+it)|."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import BudgetExceeded, DomainError
from .quadrature import DEFAULT_QUAD, MomentResult, PrefixIntegral, QuadratureSpec, integrate_uniform, uniform_nodes
from .reduction import tree_sum
from .zeta_eval import DEFAULT_POLICY, EvalPolicy, ZetaGrid, grid_spacing, zeta_grid

SQRT_PI = math.sqrt(math.pi)
T_CAP = 1.0e5


def _propagated(grid: ZetaGrid, k: float, h: float, weight: np.ndarray | None = None) -> float:
    """Integral of the first-order error in w |zeta|^(2k) caused by pointwise zeta errors."""
    a = np.sqrt(grid.abs2)
    d = 2 * k * a ** (2 * k - 1) * grid.err if k > 0 else np.zeros_like(a)
    if weight is not None:
        d = d * weight
    return float(h * tree_sum(d))


def _check_T(T: float) -> None:
    if T > T_CAP:
        raise BudgetExceeded(f"T = {T:g} exceeds the desk-scale cap {T_CAP:g}")


def _grid_over(a: float, b: float, q: QuadratureSpec, policy: EvalPolicy, h_cap: float | None = None):
    h_max = grid_spacing(max(abs(a), abs(b)), q.spacing_c)
    if h_cap is not None:
        h_max = min(h_max, h_cap)
    h, n = uniform_nodes(a, b, h_max)
    if n > q.max_evals:
        raise BudgetExceeded(f"{n} nodes needed on [{a:g}, {b:g}], budget is {q.max_evals}")
    return zeta_grid(a, h, n, policy)


def _converge(compute, q: QuadratureSpec) -> MomentResult:
    """Run ``compute(spec)``, halving the spacing everywhere until the error target is met.

    ``compute`` raises BudgetExceeded once a grid would exceed max_evals.
    """
    spec = q
    while True:
        res = compute(spec)
        if res.est_err <= q.target_rel_err * abs(res.value) or res.est_err == 0.0:
            return res
        if spec.spacing_c / 2 < 1e-4:
            raise BudgetExceeded(
                f"estimated error {res.est_err:.3g} above target {q.target_rel_err:g} relative "
                f"(value {res.value:.6g}, {res.evals} evaluations)"
            )
        spec = spec.refined()


PANEL_CELLS = 64


def _adaptive(
    a: float,
    b: float,
    k: float,
    q: QuadratureSpec,
    policy: EvalPolicy,
    weight=None,
    h_cap: float | None = None,
) -> MomentResult:
    """Integral of w(t) |zeta(1/2+it)|^(2k) over [a, b] by panel-wise refinement.

    Only panels carrying more than their share of the error are halved.
    ``weight`` maps node arrays to w(t) (default 1).
    """
    h0 = grid_spacing(max(abs(a), abs(b)), 0.25)
    if h_cap is not None:
        h0 = min(h0, h_cap)
    npan = max(int(math.ceil((b - a) / (PANEL_CELLS * h0))), 1)
    edges = np.linspace(a, b, npan + 1)
    level = np.zeros(npan, dtype=int)
    cache: dict[tuple[int, int], tuple[float, float, int]] = {}
    tol = q.target_rel_err
    while True:
        vals = np.empty(npan)
        errs = np.empty(npan)
        evals = 0
        for i in range(npan):
            key = (i, int(level[i]))
            if key not in cache:
                cells = PANEL_CELLS * 2 ** int(level[i])
                h = (edges[i + 1] - edges[i]) / cells
                grid = zeta_grid(edges[i], h, cells + 1, policy)
                w = None if weight is None else weight(grid.t)
                f = grid.abs_power(k) if w is None else grid.abs_power(k) * w
                fine = integrate_uniform(f, h)
                coarse = integrate_uniform(f[::2], 2 * h)
                cache[key] = (fine, abs(fine - coarse) + _propagated(grid, k, h, w), cells + 1)
            vals[i], errs[i], n = cache[key]
            evals += n
        total = float(tree_sum(vals))
        est = float(tree_sum(errs))
        if est <= tol * abs(total) or est == 0.0:
            return MomentResult(total, est, evals)
        share = tol * abs(total) * np.diff(edges) / (b - a)
        refine = errs > share
        if not refine.any():
            refine = errs == errs.max()
        extra = int(sum(PANEL_CELLS * 2 ** int(level[i]) for i in np.nonzero(refine)[0]))
        if evals + extra > q.max_evals:
            raise BudgetExceeded(
                f"estimated error {est:.3g} above target {tol:g} relative with {evals} evaluations (budget {q.max_evals})"
            )
        level[refine] += 1


# --------------------------------------------------------------------------
# I_k(T)
# --------------------------------------------------------------------------


def cumulative_moment(
    k: float, T: float, q: QuadratureSpec = DEFAULT_QUAD, policy: EvalPolicy = DEFAULT_POLICY, t0: float = 0.0
) -> PrefixIntegral:
    """Prefix integral of |zeta(1/2+it)|^(2k) over [t0, T]; evaluate it at any x in range."""
    _check_T(T)
    grid = _grid_over(t0, T, q, policy)
    return PrefixIntegral(grid.t0, grid.h, grid.abs_power(k))


def moment_I(k: float, T: float, q: QuadratureSpec = DEFAULT_QUAD, policy: EvalPolicy = DEFAULT_POLICY) -> MomentResult:
    """I_k(T) = integral_0^T |zeta(1/2+it)|^(2k) dt."""
    if k <= 0:
        raise DomainError("k must be positive")
    if T < 0:
        raise DomainError("T must be non-negative")
    if T == 0:
        return MomentResult(0.0, 0.0, 0)
    _check_T(T)
    if q.policy == "adaptive":
        return _adaptive(0.0, T, k, q, policy)

    def compute(spec):
        grid = _grid_over(0.0, T, spec, policy)
        f = grid.abs_power(k)
        fine = integrate_uniform(f, grid.h)
        coarse = integrate_uniform(f[::2], 2 * grid.h)
        est = abs(fine - coarse) + _propagated(grid, k, grid.h)
        return MomentResult(fine, est, grid.t.size)

    return _converge(compute, q)


# --------------------------------------------------------------------------
# J_k(t, G)
# --------------------------------------------------------------------------


def smoothed_J(
    k: float, t: float, G: float, q: QuadratureSpec = DEFAULT_QUAD, policy: EvalPolicy = DEFAULT_POLICY
) -> MomentResult:
    """Gaussian-smoothed moment (1/(sqrt(pi) G)) int |zeta(1/2+it+iu)|^(2k) exp(-(u/G)^2) du.

    The integral is truncated at |u| <= G log t; the dropped tail is bounded
    by exp(-log^2 t) times the largest integrand value in the window.
    """
    if not (1 <= G <= t / 2):
        raise DomainError(f"need 1 <= G <= t/2, got G={G:g}, t={t:g}")
    L = G * math.log(t)
    _check_T(t + L)
    if q.policy == "adaptive":
        def gauss(x):
            return np.exp(-(((x - t) / G) ** 2)) / (SQRT_PI * G)

        r = _adaptive(t - L, t + L, k, q, policy, weight=gauss)
        f_max = float(np.max(zeta_grid(t - L, 2 * L / 256, 257, policy).abs_power(k)))
        return MomentResult(r.value, r.est_err + math.exp(-math.log(t) ** 2) * f_max, r.evals)

    def compute(spec):
        grid = _grid_over(t - L, t + L, spec, policy)
        u = grid.t - t
        w = np.exp(-((u / G) ** 2)) / (SQRT_PI * G)
        f = grid.abs_power(k)
        fw = f * w
        fine = float(grid.h * tree_sum(fw))
        coarse = float(2 * grid.h * tree_sum(fw[::2]))
        tail = math.exp(-math.log(t) ** 2) * float(f.max())
        prop = _propagated(grid, k, grid.h, w)
        return MomentResult(fine, abs(fine - coarse) + tail + prop, grid.t.size)

    return _converge(compute, q)


# --------------------------------------------------------------------------
# short-interval moments
# --------------------------------------------------------------------------


def _even_exponent(l: int, name: str) -> float:
    if l < 0 or l % 2:
        raise DomainError(f"{name} must be a non-negative even integer, got {l}")
    return l / 2


def interval_moment(
    l: int, t: float, G: float, q: QuadratureSpec = DEFAULT_QUAD, policy: EvalPolicy = DEFAULT_POLICY
) -> MomentResult:
    """integral_{t-G}^{t+G} |zeta(1/2+ix)|^l dx for even l."""
    if l <= 0:
        raise DomainError("l must be a positive even integer")
    k = _even_exponent(l, "l")
    if not 0 < G < t:
        raise DomainError("need 0 < G < t")
    _check_T(t + G)
    if q.policy == "adaptive":
        return _adaptive(t - G, t + G, k, q, policy, h_cap=G / 4)

    def compute(spec):
        grid = _grid_over(t - G, t + G, spec, policy, h_cap=G / 4)
        f = grid.abs_power(k)
        fine = integrate_uniform(f, grid.h)
        coarse = integrate_uniform(f[::2], 2 * grid.h)
        return MomentResult(fine, abs(fine - coarse) + _propagated(grid, k, grid.h), grid.t.size)

    return _converge(compute, q)


# --------------------------------------------------------------------------
# hybrid moments
# --------------------------------------------------------------------------

STUDIED_EXPONENTS = (2, 4)


@dataclass(frozen=True)
class HybridMomentSpec:
    """integral_T^2T |zeta|^k (integral_{t-G}^{t+G} |zeta|^l dx)^m dt.

    ``extended`` unlocks exponents outside {2, 4}, k = 0 and G < 1.
    """

    k: int
    l: int
    m: int
    T: float
    G: float
    outer: QuadratureSpec = field(default_factory=QuadratureSpec)
    inner: QuadratureSpec = field(default_factory=QuadratureSpec)
    extended: bool = False

    def __post_init__(self):
        for name, v in (("k", self.k), ("l", self.l)):
            if v < 0 or v % 2:
                raise DomainError(f"{name} must be an even integer, got {v}")
        if self.l == 0:
            raise DomainError("l must be positive")
        if self.m < 1:
            raise DomainError("m must be a positive integer")
        if self.T < 10:
            raise DomainError("T must be >= 10")
        if not 0 < self.G <= self.T:
            raise DomainError("need 0 < G <= T")
        if not self.extended:
            if self.k not in STUDIED_EXPONENTS or self.l not in STUDIED_EXPONENTS:
                raise DomainError("(k, l) outside {2, 4}^2; pass extended=True")
            if self.G < 1:
                raise DomainError("G < 1 requires extended=True")


def _hybrid_grid(spec: HybridMomentSpec, c: float, policy: EvalPolicy, budget: int):
    T, G = spec.T, spec.G
    h_max = min(grid_spacing(2 * T + G, c), G / 4)
    steps = int(math.ceil(T / h_max))
    steps += steps % 2
    h = T / steps
    pad = int(math.ceil(G / h)) + 2
    pad += pad % 2
    n = steps + 1 + 2 * pad
    if n > budget:
        raise BudgetExceeded(f"hybrid moment needs {n} shared nodes, budget is {budget}")
    grid = zeta_grid(T - pad * h, h, n, policy)
    return grid, pad, steps


def _hybrid_on_grid(spec: HybridMomentSpec, grid: ZetaGrid, pad: int, steps: int, stride: int = 1):
    h = grid.h * stride
    idx = np.arange(pad, pad + steps + 1, stride)
    inner = PrefixIntegral(grid.t0, h, grid.abs_power(spec.l / 2)[::stride])
    t = grid.t[idx]
    window = inner(t + spec.G) - inner(t - spec.G)
    outer = grid.abs_power(spec.k / 2)[idx] * window**spec.m
    return integrate_uniform(outer, h), window


def hybrid_moment(spec: HybridMomentSpec, policy: EvalPolicy = DEFAULT_POLICY) -> MomentResult:
    """Hybrid moment with one shared |zeta|^l grid read through prefix sums.

    Cost is one grid over [T-G, 2T+G] plus O(1) work per outer node.
    """
    _check_T(2 * spec.T + spec.G)
    q = spec.outer

    def compute(qs):
        grid, pad, steps = _hybrid_grid(spec, min(qs.spacing_c, spec.inner.spacing_c), policy, min(q.max_evals, spec.inner.max_evals))
        fine, _ = _hybrid_on_grid(spec, grid, pad, steps)
        coarse, _ = _hybrid_on_grid(spec, grid, pad, steps, stride=2)
        return MomentResult(fine, abs(fine - coarse), grid.t.size)

    return _converge(compute, q)


def hybrid_exchanged(spec: HybridMomentSpec, policy: EvalPolicy = DEFAULT_POLICY) -> MomentResult:
    """The m = 1 hybrid moment with the order of integration exchanged.

    integral_{T-G}^{2T+G} |zeta(x)|^l (integral over t in [T, 2T] with |t-x| <= G of |zeta(t)|^k) dx
    """
    if spec.m != 1:
        raise DomainError("order exchange is only defined for m = 1")
    T, G = spec.T, spec.G
    grid, pad, steps = _hybrid_grid(spec, min(spec.outer.spacing_c, spec.inner.spacing_c), policy, spec.outer.max_evals)
    h = grid.h
    # prefix integral of |zeta|^k restricted to [T, 2T]
    sl = slice(pad, pad + steps + 1)
    Fk = PrefixIntegral(grid.t[pad], h, grid.abs_power(spec.k / 2)[sl])
    x = grid.t
    lo = np.clip(x - G, T, 2 * T)
    hi = np.clip(x + G, T, 2 * T)
    inner = np.where(hi > lo, Fk(hi) - Fk(lo), 0.0)
    outer = grid.abs_power(spec.l / 2) * inner
    # outer support is [T-G, 2T+G]; the padded nodes beyond it carry zero weight
    value = integrate_uniform(outer, h)
    return MomentResult(value, 0.0, grid.t.size)


def hybrid_expected_scale(k: int, l: int, m: int, T: float, G: float) -> float:
    """T G^m (log T)^((l^2 m + k^2)/4), the order of the lower bound for hybrid moments."""
    return T * G**m * math.log(T) ** ((l * l * m + k * k) / 4)

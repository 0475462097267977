"""Quadrature plumbing shared by the moment computations.

Integrands here are positive and oscillate at the scale of the zero gap,
so we use low-order rules on fine uniform grids: the trapezoid rule with
the Euler-Maclaurin end correction h^2/12 (f'(a) - f'(b)) where the
derivatives are replaced by central differences.  On a single cell this
is the four-point rule h/24 (-f[i-1] + 13 f[i] + 13 f[i+1] - f[i+2]).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .reduction import tree_sum

POLICIES = ("uniform", "adaptive")


@dataclass(frozen=True)
class QuadratureSpec:
    """Node policy and error targets.

    ``a`` and ``b`` are only consulted by operations whose interval is not
    fixed by their own arguments.
    """

    policy: str = "uniform"
    target_rel_err: float = 1e-3
    max_evals: int = 4_000_000
    spacing_c: float = 0.125
    a: float | None = None
    b: float | None = None

    def __post_init__(self):
        if self.policy not in POLICIES:
            raise ValueError(f"unknown quadrature policy {self.policy!r}")
        if not 0 < self.target_rel_err <= 0.1:
            raise ValueError("target_rel_err must lie in (0, 0.1]")
        if self.max_evals < 16:
            raise ValueError("max_evals must be >= 16")
        if not 0 < self.spacing_c <= 0.25:
            raise ValueError("spacing_c must lie in (0, 1/4]")
        if self.a is not None and self.b is not None and not self.a < self.b:
            raise ValueError("need a < b")

    def refined(self) -> "QuadratureSpec":
        return QuadratureSpec(self.policy, self.target_rel_err, self.max_evals, self.spacing_c / 2, self.a, self.b)


DEFAULT_QUAD = QuadratureSpec()


@dataclass(frozen=True)
class MomentResult:
    value: float
    est_err: float
    evals: int


def cell_increments(f: np.ndarray, h: float) -> np.ndarray:
    """Integrals over consecutive cells of a uniform grid (fourth order)."""
    f = np.asarray(f, dtype=float)
    n = f.size
    if n < 2:
        return np.zeros(0)
    if n < 4:
        return 0.5 * h * (f[:-1] + f[1:])
    inc = np.empty(n - 1)
    inc[1:-1] = (h / 24.0) * (-f[:-3] + 13.0 * f[1:-2] + 13.0 * f[2:-1] - f[3:])
    inc[0] = (h / 24.0) * (9.0 * f[0] + 19.0 * f[1] - 5.0 * f[2] + f[3])
    inc[-1] = (h / 24.0) * (f[-4] - 5.0 * f[-3] + 19.0 * f[-2] + 9.0 * f[-1])
    return inc


def integrate_uniform(f: np.ndarray, h: float) -> float:
    """Corrected trapezoid over the whole grid, summed in a fixed tree."""
    return float(tree_sum(cell_increments(f, h)))


class PrefixIntegral:
    """F(x) = integral of f from x0 to x, known at nodes and interpolated between.

    Interpolation is cubic Hermite using F at the cell ends and F' = f.
    """

    def __init__(self, x0: float, h: float, f: np.ndarray):
        self.x0 = float(x0)
        self.h = float(h)
        self.f = np.asarray(f, dtype=float)
        self.F = np.concatenate(([0.0], np.cumsum(cell_increments(self.f, self.h))))

    @property
    def n(self) -> int:
        return self.f.size

    @property
    def x1(self) -> float:
        return self.x0 + self.h * (self.n - 1)

    @property
    def total(self) -> float:
        return float(self.F[-1])

    def coarse(self) -> "PrefixIntegral":
        """The same integrand on every other node (for error estimates)."""
        return PrefixIntegral(self.x0, 2 * self.h, self.f[::2])

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        pos = (x - self.x0) / self.h
        if np.any(pos < -1e-9) or np.any(pos > self.n - 1 + 1e-9):
            raise ValueError("point outside the tabulated range")
        i = np.clip(np.floor(pos).astype(int), 0, self.n - 2)
        s = np.clip(pos - i, 0.0, 1.0)
        s2 = s * s
        s3 = s2 * s
        h00 = 2 * s3 - 3 * s2 + 1
        h10 = s3 - 2 * s2 + s
        h01 = -2 * s3 + 3 * s2
        h11 = s3 - s2
        out = h00 * self.F[i] + h10 * self.h * self.f[i] + h01 * self.F[i + 1] + h11 * self.h * self.f[i + 1]
        return out[()] if out.ndim == 0 else out

    def integral(self, a, b):
        return self(b) - self(a)


def uniform_nodes(a: float, b: float, h_max: float) -> tuple[float, int]:
    """Spacing h <= h_max dividing [a, b] evenly, and the node count."""
    cells = max(int(math.ceil((b - a) / h_max - 1e-12)), 3)
    if cells % 2:
        cells += 1
    return (b - a) / cells, cells + 1

"""Divisor function, the Dirichlet divisor-problem error term and its alternating variant.

    Delta(x)  = sum_{n <= x} d(n) - x (log x + 2 gamma - 1)
    Delta*(x) = -Delta(x) + 2 Delta(2x) - Delta(4x)/2
              = (1/2) sum_{n <= 4x} (-1)^n d(n) - x (log x + 2 gamma - 1)
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import CapacityExceeded, TableTooSmall

EULER_GAMMA = 0.57721566490153286060651209008240243
# 2 gamma - 1
TWO_GAMMA_MINUS_ONE = 0.15443132980306572121302418016480486

MAX_TABLE = 200_000_000


@dataclass(frozen=True)
class DivisorTable:
    """d(n) for 0 <= n <= limit (d[0] = 0) with plain and alternating prefix sums."""

    limit: int
    d: np.ndarray
    prefix: np.ndarray
    alt_prefix: np.ndarray

    def __getitem__(self, n):
        return self.d[n]


def build_divisor_table(N: int, max_limit: int = MAX_TABLE) -> DivisorTable:
    """Sieve d(n) by incrementing over multiples, O(N log N)."""
    if N < 1:
        raise ValueError("N must be >= 1")
    if N > max_limit:
        raise CapacityExceeded(f"divisor table of size {N} exceeds the budget {max_limit}")
    d = np.zeros(N + 1, dtype=np.int64)
    for j in range(1, N + 1):
        d[j::j] += 1
    sign = np.where(np.arange(N + 1) % 2 == 0, 1, -1)
    prefix = np.cumsum(d)
    alt_prefix = np.cumsum(sign * d)
    for arr in (d, prefix, alt_prefix):
        arr.setflags(write=False)
    return DivisorTable(N, d, prefix, alt_prefix)


def _floor_index(x, table: DivisorTable, what: str) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if np.any(x <= 0):
        raise ValueError("x must be positive")
    idx = np.floor(x).astype(np.int64)
    if np.any(idx > table.limit):
        raise TableTooSmall(f"{what} needs d(n) up to {int(idx.max())}, table holds {table.limit}")
    return idx


def divisor_main_term(x):
    x = np.asarray(x, dtype=float)
    return x * (np.log(x) + TWO_GAMMA_MINUS_ONE)


def delta(x, table: DivisorTable, require_star: bool = True):
    """Delta(x).  By default 4x must fit in the table so Delta*(x) is computable too."""
    x = np.asarray(x, dtype=float)
    _floor_index(4 * x if require_star else x, table, "delta")
    idx = _floor_index(x, table, "delta")
    out = table.prefix[idx] - divisor_main_term(x)
    return out[()] if out.ndim == 0 else out


def delta_star(x, table: DivisorTable):
    """Delta*(x) from the alternating sum of d(n)."""
    x = np.asarray(x, dtype=float)
    idx = _floor_index(4 * x, table, "delta_star")
    out = 0.5 * table.alt_prefix[idx] - divisor_main_term(x)
    return out[()] if out.ndim == 0 else out


def delta_star_combination(x, table: DivisorTable):
    """Delta*(x) as -Delta(x) + 2 Delta(2x) - Delta(4x)/2."""
    x = np.asarray(x, dtype=float)
    _floor_index(4 * x, table, "delta_star")
    out = (
        -delta(x, table, require_star=False)
        + 2.0 * delta(2 * x, table, require_star=False)
        - 0.5 * delta(4 * x, table, require_star=False)
    )
    return out


@dataclass(frozen=True)
class DivisorErrorSample:
    x: float
    delta: float
    delta_star: float


def divisor_error_sample(x: float, table: DivisorTable) -> DivisorErrorSample:
    return DivisorErrorSample(float(x), float(delta(x, table)), float(delta_star(x, table)))


def divisor_count_naive(n: int) -> int:
    """Trial-division divisor count (oracle)."""
    count = 0
    r = math.isqrt(n)
    for j in range(1, r + 1):
        if n % j == 0:
            count += 1 if j * j == n else 2
    return count

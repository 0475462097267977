"""Exact counters for two Diophantine inequalities with square roots.

Three-term problem: integers M < m <= 2M, M' < n <= 2M', k >= 1 with
|sqrt m + sqrt n - sqrt k| <= delta sqrt M.

Four-term problem: integers N < n_i <= 2N with
|n1^(1/k) + n2^(1/k) - n3^(1/k) - n4^(1/k)| < delta N^(1/k).

Floating point is used to locate candidates; anything within a relative
1e-10 of a boundary is re-decided in 50-digit arithmetic.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import mpmath
import numpy as np

from .errors import BudgetExceeded, DomainError
from .reduction import blocks, get_threads, parallel_map

THREE_TERM_MAX_M = 10_000
FOUR_TERM_MAX_NAIVE = 300
FOUR_TERM_MAX_MITM = 3000
GUARD = 1e-10
_DPS = 50


@dataclass(frozen=True)
class CountQuery3:
    M: int
    M_prime: int
    delta: float

    def __post_init__(self):
        if self.M < 1 or self.M_prime < 1:
            raise DomainError("M and M' must be positive")
        if self.M_prime > self.M:
            raise DomainError("need M' <= M")
        if not 0 < self.delta <= 1:
            raise DomainError("delta must lie in (0, 1]")


@dataclass(frozen=True)
class CountQuery4:
    N: int
    delta: float
    k_root: int = 2

    def __post_init__(self):
        if self.N < 1:
            raise DomainError("N must be positive")
        if self.delta <= 0:
            raise DomainError("delta must be positive")
        if self.k_root < 2:
            raise DomainError("k_root must be >= 2")


@dataclass(frozen=True)
class CountReport:
    count: int
    bound_value: float

    @property
    def ratio(self) -> float:
        return self.count / self.bound_value


# --------------------------------------------------------------------------
# three-term inequality
# --------------------------------------------------------------------------


def _in_window3(m: int, n: int, k: int, r) -> bool:
    """|sqrt m + sqrt n - sqrt k| <= r, decided exactly for exact solutions, else in 50 digits."""
    # sqrt m + sqrt n = sqrt k  iff  k >= m + n and (k - m - n)^2 = 4 m n
    if k >= m + n and (k - m - n) ** 2 == 4 * m * n:
        return True
    with mpmath.workdps(_DPS):
        return abs(mpmath.sqrt(m) + mpmath.sqrt(n) - mpmath.sqrt(k)) <= mpmath.mpf(r)


def _count3_rows(q: CountQuery3, ms: np.ndarray) -> int:
    r = q.delta * math.sqrt(q.M)
    r_mp = mpmath.mpf(q.delta) * mpmath.sqrt(q.M)
    n = np.arange(q.M_prime + 1, 2 * q.M_prime + 1)
    total = 0
    for m in ms:
        s = math.sqrt(m) + np.sqrt(n)
        a = np.maximum(s - r, 0.0) ** 2
        b = (s + r) ** 2
        lo = np.maximum(np.ceil(a), 1.0)
        hi = np.floor(b)
        cnt = np.maximum(hi - lo + 1, 0).astype(np.int64)
        # pairs with an end of [a, b] close to an integer are recounted exactly
        tol = GUARD * b + 1e-300
        amb = (np.abs(a - np.round(a)) <= tol) | (np.abs(b - np.round(b)) <= tol)
        for j in np.nonzero(amb)[0]:
            nn = int(n[j])
            k_lo = max(int(math.floor(a[j])) - 1, 1)
            k_hi = int(math.ceil(b[j])) + 1
            cnt[j] = sum(_in_window3(int(m), nn, kk, r_mp) for kk in range(k_lo, k_hi + 1))
        total += int(cnt.sum())
    return total


def three_term_bound(q: CountQuery3, C_bound: float = 1.0) -> float:
    M, Mp = q.M, q.M_prime
    return C_bound * math.log(M + 2) * (M * M * Mp * q.delta + math.sqrt(M * Mp))


def count_lemma3(q: CountQuery3, C_bound: float = 1.0, threads: int | None = None) -> CountReport:
    """Exact count of (m, n, k) over the box; k only ranges over the window the inequality forces."""
    if q.M > THREE_TERM_MAX_M:
        raise BudgetExceeded(f"M = {q.M} exceeds the brute-force budget {THREE_TERM_MAX_M}")
    ms = np.arange(q.M + 1, 2 * q.M + 1)
    chunks = [ms[sl] for sl in blocks(ms.size, 64)]
    parts = parallel_map(lambda c: _count3_rows(q, c), chunks, threads or get_threads())
    return CountReport(int(sum(parts)), three_term_bound(q, C_bound))


def squarefree_kernel(n: int) -> int:
    """Largest squarefree d with n = a^2 d."""
    d, p = 1, 2
    while p * p <= n:
        e = 0
        while n % p == 0:
            n //= p
            e += 1
        if e % 2:
            d *= p
        p += 1
    return d * n


def count_exact_solutions3(M: int, M_prime: int) -> int:
    """Number of (m, n, k) with sqrt m + sqrt n = sqrt k exactly.

    Such triples are m = a^2 d, n = b^2 d, k = (a + b)^2 d, so this just
    counts pairs (m, n) in the box with equal squarefree kernels.
    """
    km = [squarefree_kernel(m) for m in range(M + 1, 2 * M + 1)]
    kn: dict[int, int] = {}
    for n in range(M_prime + 1, 2 * M_prime + 1):
        d = squarefree_kernel(n)
        kn[d] = kn.get(d, 0) + 1
    return sum(kn.get(d, 0) for d in km)


# --------------------------------------------------------------------------
# four-term inequality
# --------------------------------------------------------------------------


def _roots(q: CountQuery4) -> np.ndarray:
    return np.arange(q.N + 1, 2 * q.N + 1, dtype=float) ** (1.0 / q.k_root)


def _strict4(q: CountQuery4, n1: int, n2: int, n3: int, n4: int) -> bool:
    if (n1 == n3 and n2 == n4) or (n1 == n4 and n2 == n3):
        return True
    with mpmath.workdps(_DPS):
        e = mpmath.mpf(1) / q.k_root
        lhs = mpmath.power(n1, e) + mpmath.power(n2, e) - mpmath.power(n3, e) - mpmath.power(n4, e)
        return abs(lhs) < mpmath.mpf(q.delta) * mpmath.power(q.N, e)


def four_term_bound(q: CountQuery4, C_bound: float = 1.0) -> float:
    N = q.N
    return C_bound * math.log(N + 2) * (N**4 * q.delta + N**2)


def count_lemma4_naive(q: CountQuery4) -> int:
    """Four nested loops (the innermost two vectorized) comparing the full expression."""
    if q.N > FOUR_TERM_MAX_NAIVE:
        raise BudgetExceeded(f"naive counter is capped at N = {FOUR_TERM_MAX_NAIVE}")
    x = _roots(q)
    w = q.delta * q.N ** (1.0 / q.k_root)
    base = np.arange(q.N + 1, 2 * q.N + 1)
    total = 0
    for i, a in enumerate(x):
        for j, b in enumerate(x):
            lhs = np.abs(a + b - x[:, None] - x[None, :])
            total += int(np.count_nonzero(lhs < w * (1 - GUARD)))
            amb = np.nonzero((lhs >= w * (1 - GUARD)) & (lhs <= w * (1 + GUARD)))
            for u, v in zip(*amb):
                total += _strict4(q, int(base[i]), int(base[j]), int(base[u]), int(base[v]))
    return total


def count_lemma4_mitm(q: CountQuery4) -> int:
    """Sort the N^2 pair sums, then count partners within the window by binary search."""
    if q.N > FOUR_TERM_MAX_MITM:
        raise BudgetExceeded(f"meet-in-the-middle counter is capped at N = {FOUR_TERM_MAX_MITM}")
    x = _roots(q)
    w = q.delta * q.N ** (1.0 / q.k_root)
    sums = (x[:, None] + x[None, :]).ravel()
    order = np.argsort(sums, kind="stable")
    s = sums[order]
    inner = w * (1 - GUARD)
    outer = w * (1 + GUARD)
    sure = np.searchsorted(s, s + inner, side="left") - np.searchsorted(s, s - inner, side="right")
    total = int(sure.sum())
    # partners in the guard bands on either side are decided exactly
    lo_a, lo_b = np.searchsorted(s, s - outer, side="left"), np.searchsorted(s, s - inner, side="right")
    hi_a, hi_b = np.searchsorted(s, s + inner, side="left"), np.searchsorted(s, s + outer, side="right")
    N = q.N
    for p in np.nonzero((lo_b > lo_a) | (hi_b > hi_a))[0]:
        i1, i2 = divmod(int(order[p]), N)
        for r in list(range(lo_a[p], lo_b[p])) + list(range(hi_a[p], hi_b[p])):
            i3, i4 = divmod(int(order[r]), N)
            total += _strict4(q, N + 1 + i1, N + 1 + i2, N + 1 + i3, N + 1 + i4)
    return total


def count_lemma4(q: CountQuery4, C_bound: float = 1.0, method: str = "mitm") -> CountReport:
    if method == "mitm":
        count = count_lemma4_mitm(q)
    elif method == "naive":
        count = count_lemma4_naive(q)
    else:
        raise ValueError(f"unknown method {method!r}")
    return CountReport(count, four_term_bound(q, C_bound))

from __future__ import annotations

import itertools

import mpmath
import pytest

from hybridzeta.counting import (
    CountQuery3,
    CountQuery4,
    count_exact_solutions3,
    count_lemma3,
    count_lemma4,
    count_lemma4_mitm,
    count_lemma4_naive,
    squarefree_kernel,
)
from hybridzeta.errors import BudgetExceeded, DomainError


def _brute3(M: int, Mp: int, delta: float) -> int:
    """Every k up to well past the window, each decided in 40 digits."""
    count = 0
    with mpmath.workdps(40):
        r = mpmath.mpf(delta) * mpmath.sqrt(M)
        k_top = int((2 * (2 * M) ** 0.5 + 2) ** 2) + 10
        for m in range(M + 1, 2 * M + 1):
            for n in range(Mp + 1, 2 * Mp + 1):
                s = mpmath.sqrt(m) + mpmath.sqrt(n)
                count += sum(abs(s - mpmath.sqrt(k)) <= r for k in range(1, k_top))
    return count


# ---------------------------------------------------------------- three terms


def test_three_term_exact_solutions_small_box():
    assert count_lemma3(CountQuery3(4, 4, 1e-9)).count == 4


@pytest.mark.parametrize("M, Mp, delta", [(6, 3, 1e-9), (8, 8, 0.01), (7, 5, 0.2)])
def test_three_term_against_full_enumeration(M, Mp, delta):
    assert count_lemma3(CountQuery3(M, Mp, delta)).count == _brute3(M, Mp, delta)


@pytest.mark.parametrize("M, Mp", [(4, 4), (50, 20), (128, 128), (200, 75)])
def test_three_term_tiny_delta_is_exact_solutions(M, Mp):
    assert count_lemma3(CountQuery3(M, Mp, 1e-12)).count == count_exact_solutions3(M, Mp)


def test_squarefree_kernel():
    assert [squarefree_kernel(n) for n in (1, 4, 12, 18, 50, 97, 360)] == [1, 1, 3, 2, 2, 97, 10]


def test_three_term_monotone_in_delta():
    a = count_lemma3(CountQuery3(32, 32, 1e-3)).count
    b = count_lemma3(CountQuery3(32, 32, 1e-2)).count
    assert a <= b


def test_three_term_bound_ratio():
    assert count_lemma3(CountQuery3(64, 16, 2.0**-10)).ratio <= 100


def test_three_term_thread_invariant():
    q = CountQuery3(100, 60, 2.0**-8)
    assert count_lemma3(q, threads=1).count == count_lemma3(q, threads=4).count


def test_three_term_budget_and_domain():
    with pytest.raises(BudgetExceeded):
        count_lemma3(CountQuery3(10_001, 1, 0.1))
    with pytest.raises(DomainError):
        CountQuery3(4, 5, 0.1)
    with pytest.raises(DomainError):
        CountQuery3(4, 4, 1.5)


# ---------------------------------------------------------------- four terms


def test_four_term_vacuous_delta_counts_box():
    for N in (3, 10):
        assert count_lemma4(CountQuery4(N, 2.0)).count == N**4


def test_four_term_diagonal_lower_bound():
    for N in (5, 20, 64):
        assert count_lemma4(CountQuery4(N, 1e-15)).count >= N * N


def test_four_term_tiny_delta_only_trivial_solutions():
    # for square roots, sqrt a + sqrt b = sqrt c + sqrt d forces {a, b} = {c, d}
    N = 30
    assert count_lemma4(CountQuery4(N, 1e-14)).count == 2 * N * N - N


def test_four_term_pair_swap_symmetry():
    q = CountQuery4(6, 2.0**-4)
    r = q.N ** 0.5 * q.delta
    box = range(q.N + 1, 2 * q.N + 1)
    hits = {t for t in itertools.product(box, repeat=4) if abs(sum(x**0.5 * s for x, s in zip(t, (1, 1, -1, -1)))) < r}
    assert hits == {(c, d, a, b) for a, b, c, d in hits}
    assert len(hits) == count_lemma4_naive(q)


@pytest.mark.parametrize("delta", [2.0**-6, 2.0**-10])
def test_four_term_mitm_equals_naive(delta):
    for N in range(1, 41):
        q = CountQuery4(N, delta)
        assert count_lemma4_mitm(q) == count_lemma4_naive(q), N


def test_four_term_cube_roots():
    q = CountQuery4(12, 2.0**-5, k_root=3)
    assert count_lemma4_mitm(q) == count_lemma4_naive(q)


def test_four_term_monotone():
    a = count_lemma4(CountQuery4(24, 2.0**-9)).count
    b = count_lemma4(CountQuery4(24, 2.0**-6)).count
    assert a <= b


def test_four_term_bound_ratio():
    assert count_lemma4(CountQuery4(128, 2.0**-12)).ratio <= 100


def test_four_term_budget():
    with pytest.raises(BudgetExceeded):
        count_lemma4(CountQuery4(301, 0.1), method="naive")
    with pytest.raises(BudgetExceeded):
        count_lemma4(CountQuery4(3001, 0.1))
    with pytest.raises(DomainError):
        CountQuery4(4, 0.1, k_root=1)

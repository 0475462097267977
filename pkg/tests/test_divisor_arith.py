from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hybridzeta.divisor_arith import (
    EULER_GAMMA,
    build_divisor_table,
    delta,
    delta_star,
    delta_star_combination,
    divisor_count_naive,
    divisor_error_sample,
)
from hybridzeta.errors import CapacityExceeded, TableTooSmall


def test_small_values(table):
    assert table.d[1] == 1
    assert table.d[12] == 6
    assert table.d[16] * table.d[9] == table.d[144]


def test_primes_have_two_divisors(table):
    for p in (2, 3, 5, 7, 97, 7919, 104729):
        assert table.d[p] == 2


_SMALL = build_divisor_table(160_000)


@given(st.integers(1, 400), st.integers(1, 400))
@settings(max_examples=200, deadline=None)
def test_multiplicative(m, n):
    if math.gcd(m, n) == 1:
        assert _SMALL.d[m * n] == _SMALL.d[m] * _SMALL.d[n]


def test_sieve_matches_trial_division():
    t = build_divisor_table(10_000)
    assert all(t.d[n] == divisor_count_naive(n) for n in range(1, 10_001))


def test_table_is_read_only(table):
    with pytest.raises(ValueError):
        table.d[5] = 0


def test_capacity():
    with pytest.raises(CapacityExceeded):
        build_divisor_table(10**9)
    with pytest.raises(ValueError):
        build_divisor_table(0)


def test_delta_values(table):
    assert delta(1.0, table) == pytest.approx(2 - 2 * EULER_GAMMA, abs=1e-12)
    assert delta(1.0, table) == pytest.approx(0.845569, abs=1e-6)
    assert table.prefix[10] == 27
    assert delta(10.0, table) == pytest.approx(2.42984, abs=1e-5)


def test_delta_star_value(table):
    assert table.alt_prefix[20] == 22
    assert delta_star(5.0, table) == pytest.approx(2.18065, abs=1e-5)


@pytest.mark.parametrize("x", [2.5, 7.0, 33.1])
def test_delta_star_forms_agree(table, x):
    assert abs(delta_star(x, table) - delta_star_combination(x, table)) <= 1e-12


def test_table_too_small():
    t = build_divisor_table(100)
    with pytest.raises(TableTooSmall):
        delta(30.0, t)
    assert delta(30.0, t, require_star=False) == pytest.approx(t.prefix[30] - 30 * (math.log(30) + 2 * EULER_GAMMA - 1))
    with pytest.raises(TableTooSmall):
        delta_star(26.0, t)


def test_mean_of_delta_is_small(table):
    for X in (50, 100, 200):
        x = np.linspace(1, X, 200_001)
        integral = np.trapezoid(delta(x, table), x)
        assert abs(integral) <= X**1.25


def test_jump_structure(table):
    for n in (1, 2, 6, 12, 60, 360, 1000, 5040):
        jump = delta(n + 1e-9, table) - delta(n - 1e-9, table)
        assert jump == pytest.approx(table.d[n], abs=1e-6)


def test_delta_star_increment_bound(table):
    x = np.linspace(100, 1e4, 400)
    G = x**0.3
    inc = delta_star(x + G, table) - delta_star(x - G, table)
    assert np.all(inc <= 64 * G * x**0.05)


def test_error_sample(table):
    s = divisor_error_sample(5.0, table)
    assert s.delta == pytest.approx(delta(5.0, table))
    assert s.delta_star == pytest.approx(delta_star(5.0, table))

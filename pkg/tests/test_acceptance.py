"""Acceptance criteria, one test per criterion.

Each test prints a single PASS/FAIL line with the measured quantities, then
asserts.  Criteria that fail are left failing on purpose; the analysis is kept
with the project notes.
"""

from __future__ import annotations

import math

import numpy as np
import pytest

from hybridzeta.cli import main
from hybridzeta.counting import CountQuery3, CountQuery4, count_lemma3, count_lemma4, count_lemma4_naive
from hybridzeta.divisor_arith import delta, delta_star, delta_star_combination, divisor_count_naive
from hybridzeta.explicit_formulas import (
    P1,
    P4_LEADING,
    atkinson_series_J1,
    error_term_scan,
    eval_main_term,
    fit_P4,
    j1_from_estar,
    j1_residual,
)
from hybridzeta.jutila_meansq import DiffMeanSquareSpec, asymp_ratio, diff_meansq
from hybridzeta.moments import (
    HybridMomentSpec,
    cumulative_moment,
    hybrid_exchanged,
    hybrid_expected_scale,
    hybrid_moment,
    moment_I,
    smoothed_J,
)
from hybridzeta.quadrature import QuadratureSpec


@pytest.fixture
def report(capsys):
    def emit(n: int, ok: bool, detail: str) -> None:
        with capsys.disabled():
            print(f"\nacceptance {n:2d}: {'PASS' if ok else 'FAIL'}  {detail}")

    return emit


def test_01_second_moment_main_term(report):
    worst = 0.0
    for T in (500.0, 1000.0, 5000.0, 10000.0):
        e = moment_I(1, T).value - eval_main_term(P1, T)
        worst = max(worst, abs(e) / (10 * T ** (1 / 3)))
    ok = worst <= 1
    report(1, ok, f"max |E(T)| / (10 T^(1/3)) = {worst:.3f}")
    assert ok


def test_02_sign_changes(report):
    T = np.linspace(10, 2000, 4000)
    e = np.array([s.value for s in error_term_scan("E", T)])
    changes = int(np.count_nonzero(np.diff(np.sign(e)) != 0))
    ok = changes >= 10
    report(2, ok, f"{changes} sign changes of E on [10, 2000]")
    assert ok


def test_03_explicit_series_identity(report, table):
    fine = QuadratureSpec(spacing_c=0.0625)
    parts = []
    ok = True
    for T, e in ((2000.0, 0.35), (5000.0, 0.3)):
        G = T**e
        res = j1_residual(T, G, table)
        res_fine = j1_residual(T, G, table, q=fine)
        a = atkinson_series_J1(T, G, table)
        b = atkinson_series_J1(T, G, table, n_max_override=2 * a.n_max)
        cut = abs(b.oscillating_sum - a.oscillating_sum) / (1 + abs(a.oscillating_sum))
        checks = (abs(res) <= 0.5 * math.log(T), abs(res - res_fine) <= 1e-3, cut <= 1e-6)
        ok &= all(checks)
        parts.append(
            f"T={T:g}: |res|={abs(res):.3f} (<= {0.5 * math.log(T):.3f}), "
            f"quad change {abs(res - res_fine):.1e}, cutoff change {cut:.2e} (<= 1e-6)"
        )
    report(3, ok, "; ".join(parts))
    assert ok


def test_04_j1_through_estar(report, table):
    t, G = 3000.0, 3000.0**0.3
    diff = abs(smoothed_J(1, t, G).value - j1_from_estar(t, G, table))
    ok = diff <= 3 * math.log(t) ** 2
    report(4, ok, f"|J - J(E*)| = {diff:.3f} (<= {3 * math.log(t) ** 2:.1f})")
    assert ok


def test_05_short_interval_mean_square(report, table):
    s = DiffMeanSquareSpec(3000, 3000, 25)
    r = diff_meansq(s).value / diff_meansq(s, "series", table=table).value
    ratios = {e: asymp_ratio(4000.0, 4000.0**e) for e in (0.2, 0.3, 0.45)}
    ok = 0.5 <= r <= 2.0 and all(0.01 <= v <= 100 for v in ratios.values())
    shown = ", ".join(f"U=T^{e}: {v:.1f}" for e, v in ratios.items())
    report(5, ok, f"direct/series = {r:.3f} (in [0.5, 2]); asymptotic ratios {shown} (in [0.01, 100])")
    assert ok


def test_06_counting(report):
    c3 = count_lemma3(CountQuery3(4, 4, 1e-9)).count
    agree = all(
        count_lemma4(CountQuery4(N, d)).count == count_lemma4_naive(CountQuery4(N, d))
        for d in (2.0**-6, 2.0**-10)
        for N in range(1, 41)
    )
    sizes = (4, 8, 16, 32, 64, 128)
    deltas = [2.0**-j for j in (2, 4, 6, 8, 10, 12)]
    r3 = max(count_lemma3(CountQuery3(M, Mp, d)).ratio for M in sizes for Mp in sizes if Mp <= M for d in deltas)
    r4 = max(count_lemma4(CountQuery4(N, d)).ratio for N in sizes for d in deltas)
    ok = c3 == 4 and agree and r3 <= 100 and r4 <= 100
    report(6, ok, f"count(4,4,1e-9) = {c3}; mitm == naive for N <= 40: {agree}; max ratios {r3:.2f}, {r4:.2f}")
    assert ok


def test_07_hybrid_moment(report):
    ratios = []
    for T in (500.0, 1000.0):
        for e in (0.2, 0.4):
            G = T**e
            ratios.append(hybrid_moment(HybridMomentSpec(2, 2, 1, T, G)).value / hybrid_expected_scale(2, 2, 1, T, G))
    spec = HybridMomentSpec(2, 2, 1, 1000.0, 1000.0**0.4)
    a, b = hybrid_moment(spec).value, hybrid_exchanged(spec).value
    fubini = abs(a - b) / abs(a)
    ok = all(0.01 <= r <= 50 for r in ratios) and fubini <= 0.05
    report(7, ok, f"ratios {', '.join(f'{r:.2f}' for r in ratios)} (in [0.01, 50]); exchange differs by {fubini:.1e}")
    assert ok


def test_08_fourth_moment_scan(report):
    p4 = fit_P4((1e3, 1e4))
    T = np.linspace(1e3, 1e4, 40)
    e2 = np.array([s.value for s in error_term_scan("E2", T, poly=p4)])
    worst = float(np.max(np.abs(e2) / (5 * T ** (2 / 3) * np.log(T) ** 8)))
    Ts = np.linspace(1e3, 1e4, 200)
    lead = cumulative_moment(2, 1e4)(Ts) * 2 * math.pi**2 / (Ts * np.log(Ts) ** 4)
    ok = p4.coeffs[4] == P4_LEADING and worst <= 1 and np.all((lead > 0.3) & (lead < 3))
    report(8, ok, f"max |E2| / (5 T^(2/3) log^8 T) = {worst:.1e}; I2 2pi^2/(T log^4 T) in [{lead.min():.3f}, {lead.max():.3f}]")
    assert ok


def test_09_divisor_identities(report, table):
    x = np.linspace(1.0, 100.0, 100) + 0.137
    forms = float(np.max(np.abs(delta_star(x, table) - delta_star_combination(x, table))))
    n = np.arange(1, 51) * 97
    jumps = delta(n.astype(float), table) - delta(n - 1e-9, table)
    ref = np.array([divisor_count_naive(int(k)) for k in n])
    jump_err = float(np.max(np.abs(jumps - ref)))
    ok = forms <= 1e-12 and jump_err <= 1e-6
    report(9, ok, f"Delta* forms differ by {forms:.1e}; jump error {jump_err:.1e}")
    assert ok


EXPERIMENTS = [
    ["zeta-eval", "--T-lo", "20", "--T-hi", "5000", "--steps", "9"],
    ["moment", "--T", "500", "2000"],
    ["moment", "--k", "2", "--T", "800", "--quad-policy", "adaptive"],
    ["smoothed", "--T", "1000", "--G-exp", "0.3"],
    ["hybrid", "--T", "300", "--G-exp", "0.3", "--exchange"],
    ["error-term", "--T-hi", "500", "--steps", "50"],
    ["error-term", "--kind", "Estar", "--T-hi", "500", "--steps", "20", "--precision", "dd"],
    ["error-term", "--kind", "E2", "--T-lo", "1000", "--T-hi", "3000", "--steps", "5", "--calib-hi", "3000"],
    ["atkinson", "--T", "2000", "--G-exp", "0.35"],
    ["estar-j1", "--T", "1000"],
    ["count3", "--M", "40", "--Mp", "20", "--delta", "0.001"],
    ["count4", "--N", "30"],
    ["jutila", "--T", "1000", "--U-exp", "0.3"],
    ["mellin", "--sigma", "1.5", "--t", "3", "--format", "json"],
    ["mellin", "--scan", "--sigma", "1.3", "--T-hi", "10", "--steps", "20"],
]


def test_10_determinism(report, tmp_path):
    bad = []
    for i, argv in enumerate(EXPERIMENTS):
        outs = []
        for run, extra in enumerate((["--threads", "1"], ["--threads", "1"], ["--threads", "4"])):
            path = tmp_path / f"{i}-{run}.out"
            assert main([*argv, *extra, "--output", str(path)]) == 0, argv
            outs.append(path.read_bytes())
        if not outs[0] == outs[1] == outs[2]:
            bad.append(argv[0])
    ok = not bad
    report(10, ok, f"{len(EXPERIMENTS)} experiment configs rerun and at 1/4 threads; differing: {bad or 'none'}")
    assert ok

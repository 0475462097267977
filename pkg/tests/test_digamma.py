from __future__ import annotations

import numpy as np
import pytest
from scipy.special import digamma as sp_digamma

from hybridzeta.digamma import digamma


def test_real_axis_matches_scipy():
    x = np.linspace(0.05, 60.0, 400)
    assert np.max(np.abs(digamma(x).real - sp_digamma(x))) < 1e-10


def test_critical_line_matches_scipy():
    t = np.concatenate((np.linspace(0.0, 30.0, 301), np.geomspace(30.0, 1e6, 50)))
    z = 0.5 + 1j * t
    ref = sp_digamma(z)
    assert np.max(np.abs(digamma(z) - ref) / np.maximum(1.0, np.abs(ref))) < 1e-10


def test_negative_real_part_uses_recurrence():
    z = np.array([-3.3 + 0.2j, -0.5 + 1j, -7.9 - 4j])
    assert np.max(np.abs(digamma(z) - sp_digamma(z))) < 1e-10


@pytest.mark.parametrize("z", [0.0, -1.0, -4.0])
def test_poles_raise(z):
    with pytest.raises(ValueError):
        digamma(z)

from __future__ import annotations

import pytest

from hybridzeta.divisor_arith import build_divisor_table


@pytest.fixture(scope="session")
def table():
    return build_divisor_table(200_000)

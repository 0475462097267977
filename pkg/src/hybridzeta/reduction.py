"""Deterministic reductions and block-parallel mapping.

Every reduction here has a fixed topology that depends only on the input
length, never on the number of worker threads, so results are bitwise
reproducible.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Sequence, TypeVar

import numpy as np

T = TypeVar("T")
R = TypeVar("R")

BLOCK = 4096

_settings = {"threads": 1, "precision": "f64"}


def set_threads(n: int) -> None:
    if n < 1:
        raise ValueError("threads must be >= 1")
    _settings["threads"] = int(n)


def get_threads() -> int:
    return _settings["threads"]


def set_precision(mode: str) -> None:
    if mode not in ("f64", "dd"):
        raise ValueError(f"unknown precision mode {mode!r}")
    _settings["precision"] = mode


def get_precision() -> str:
    return _settings["precision"]


def blocks(n: int, size: int = BLOCK) -> list[slice]:
    """Fixed decomposition of range(n); independent of the thread count."""
    return [slice(i, min(i + size, n)) for i in range(0, n, size)]


def parallel_map(func: Callable[[T], R], items: Sequence[T], threads: int | None = None) -> list[R]:
    """Ordered map over items; order of results never depends on scheduling."""
    threads = threads or get_threads()
    if threads <= 1 or len(items) <= 1:
        return [func(x) for x in items]
    with ThreadPoolExecutor(max_workers=min(threads, len(items), os.cpu_count() or threads)) as pool:
        return list(pool.map(func, items))


def two_sum(a, b):
    s = a + b
    bb = s - a
    err = (a - (s - bb)) + (b - bb)
    return s, err


_SPLIT = 134217729.0  # 2**27 + 1


def two_prod(a, b):
    p = a * b
    t = _SPLIT * a
    ahi = t - (t - a)
    alo = a - ahi
    t = _SPLIT * b
    bhi = t - (t - b)
    blo = b - bhi
    err = ((ahi * bhi - p) + ahi * blo + alo * bhi) + alo * blo
    return p, err


def tree_sum(values, precision: str | None = None, axis: int = -1):
    """Pairwise sum with a fixed binary-tree topology along ``axis``.

    The array is zero-padded to a power of two and halved level by level.
    With ``precision='dd'`` each level carries a double-double error term.
    """
    precision = precision or get_precision()
    a = np.moveaxis(np.asarray(values, dtype=float), axis, -1)
    n = a.shape[-1]
    if n == 0:
        return np.zeros(a.shape[:-1])[()] if a.ndim > 1 else 0.0
    size = 1 << (n - 1).bit_length()
    if size != n:
        pad = [(0, 0)] * (a.ndim - 1) + [(0, size - n)]
        a = np.pad(a, pad)
    if precision == "dd":
        hi = a
        lo = np.zeros_like(a)
        while hi.shape[-1] > 1:
            s, e = two_sum(hi[..., 0::2], hi[..., 1::2])
            lo = lo[..., 0::2] + lo[..., 1::2] + e
            hi = s
        out = hi[..., 0] + lo[..., 0]
    else:
        while a.shape[-1] > 1:
            a = a[..., 0::2] + a[..., 1::2]
        out = a[..., 0]
    return out[()] if isinstance(out, np.ndarray) and out.ndim == 0 else out


def tree_sum_complex(values, precision: str | None = None, axis: int = -1):
    v = np.asarray(values)
    return tree_sum(v.real, precision, axis) + 1j * tree_sum(v.imag, precision, axis)


def exact_sum(values) -> float:
    """Correctly rounded sum; order independent by construction."""
    return math.fsum(np.asarray(values, dtype=float).ravel().tolist())

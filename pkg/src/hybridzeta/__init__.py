"""Numerical experiments on power, smoothed and hybrid moments of zeta(1/2+it)."""

from __future__ import annotations

from .errors import (
    BudgetExceeded,
    CapacityExceeded,
    ConfigInvalid,
    DomainError,
    HybridZetaError,
    IllConditioned,
    SchemaMismatch,
    TableTooSmall,
    TailDiverges,
    UnsupportedHeight,
)
from .quadrature import MomentResult, QuadratureSpec
from .zeta_eval import EvalPolicy, eval_zeta_half, zeta_half_array

__version__ = "0.1.0"

__all__ = [
    "BudgetExceeded",
    "CapacityExceeded",
    "ConfigInvalid",
    "DomainError",
    "EvalPolicy",
    "HybridZetaError",
    "IllConditioned",
    "MomentResult",
    "QuadratureSpec",
    "SchemaMismatch",
    "TableTooSmall",
    "TailDiverges",
    "UnsupportedHeight",
    "eval_zeta_half",
    "zeta_half_array",
]

"""Exact noncommutative operator algebra (3D spinor operators and radial 2x2 operators)."""
from .scalars import GaussianRational, I, as_scalar
from .core import (
    AlgebraError,
    ContextMismatchError,
    OperatorExpr,
    RadialOp,
    multiply,
    commutator,
    anticommutator,
    is_zero,
    PARAMS_3D,
    PARAMS_RADIAL,
)
from .parse import ParseError, parse_expr, THREE_D, radial

__all__ = [
    "GaussianRational",
    "I",
    "as_scalar",
    "AlgebraError",
    "ContextMismatchError",
    "OperatorExpr",
    "RadialOp",
    "multiply",
    "commutator",
    "anticommutator",
    "is_zero",
    "PARAMS_3D",
    "PARAMS_RADIAL",
    "ParseError",
    "parse_expr",
    "THREE_D",
    "radial",
]

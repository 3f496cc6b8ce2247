"""Exact scalar engine: canonical exp-rational functions, parsing, linear algebra."""

from .matrix import (
    determinant,
    echelon,
    identity,
    matmul,
    matrix_inverse,
    nullspace,
    rank,
    same_row_space,
    transpose,
    zeros,
)
from .nonvanishing import Nonvanishing, NonvanishingResult, classify_nonvanishing, value_at
from .parse import parse_many, parse_scalar
from .scalar import (
    ONE,
    TRANSCENDENTAL,
    ZERO,
    Scalar,
    as_scalar,
    const,
    differentiate,
    evaluate,
    exp,
    is_zero,
    sum_scalars,
    var,
)

__all__ = [
    "Scalar", "ZERO", "ONE", "TRANSCENDENTAL", "var", "const", "exp", "as_scalar",
    "differentiate", "is_zero", "evaluate", "sum_scalars", "parse_scalar", "parse_many",
    "identity", "zeros", "matmul", "transpose", "matrix_inverse", "determinant", "rank",
    "nullspace", "echelon", "same_row_space", "Nonvanishing", "NonvanishingResult",
    "classify_nonvanishing", "value_at",
]

"""Exact linear algebra over the field of Scalars.

Matrices are plain lists of rows.  Elimination picks the simplest available
pivot (rational constants first, then exp-units, then fewest terms) so that
fraction growth stays small on the structured matrices this package builds.
"""

from __future__ import annotations

from typing import List, Sequence, Tuple

from ..errors import SingularMatrixError
from .scalar import ONE, ZERO, Scalar, as_scalar

Matrix = List[List[Scalar]]


def identity(n: int) -> Matrix:
    return [[ONE if i == j else ZERO for j in range(n)] for i in range(n)]


def zeros(rows: int, cols: int) -> Matrix:
    return [[ZERO] * cols for _ in range(rows)]


def to_matrix(rows) -> Matrix:
    return [[as_scalar(x) for x in row] for row in rows]


def shape(m: Sequence[Sequence]) -> Tuple[int, int]:
    return len(m), (len(m[0]) if m else 0)


def matmul(a: Matrix, b: Matrix) -> Matrix:
    n, k = shape(a)
    k2, p = shape(b)
    if k != k2:
        raise ValueError(f"shape mismatch {n}x{k} @ {k2}x{p}")
    out = []
    for i in range(n):
        row = []
        ai = a[i]
        for j in range(p):
            acc = ZERO
            for t in range(k):
                x = ai[t]
                if x.is_zero():
                    continue
                y = b[t][j]
                if y.is_zero():
                    continue
                acc = acc + x * y
            row.append(acc)
        out.append(row)
    return out


def matvec(a: Matrix, v: Sequence[Scalar]) -> List[Scalar]:
    return [row[0] for row in matmul(a, [[x] for x in v])]


def madd(a: Matrix, b: Matrix) -> Matrix:
    return [[x + y for x, y in zip(ra, rb)] for ra, rb in zip(a, b)]


def msub(a: Matrix, b: Matrix) -> Matrix:
    return [[x - y for x, y in zip(ra, rb)] for ra, rb in zip(a, b)]


def mneg(a: Matrix) -> Matrix:
    return [[-x for x in row] for row in a]


def mscale(a: Matrix, s) -> Matrix:
    s = as_scalar(s)
    return [[s * x for x in row] for row in a]


def transpose(a: Matrix) -> Matrix:
    return [list(col) for col in zip(*a)] if a else []


def is_zero_matrix(a: Matrix) -> bool:
    return all(x.is_zero() for row in a for x in row)


def mequal(a: Matrix, b: Matrix) -> bool:
    return shape(a) == shape(b) and all(x == y for ra, rb in zip(a, b) for x, y in zip(ra, rb))


def block(rows_of_blocks) -> Matrix:
    out = []
    for brow in rows_of_blocks:
        height = len(brow[0])
        for i in range(height):
            out.append([x for b in brow for x in b[i]])
    return out


def sub_block(m: Matrix, r0: int, r1: int, c0: int, c1: int) -> Matrix:
    return [row[c0:c1] for row in m[r0:r1]]


def _cost(s: Scalar):
    if s.is_constant():
        return (0, 0)
    if s.is_unit():
        return (1, 0)
    return (2, len(s.num) + len(s.den))


def _find_pivot(m: Matrix, col: int, start: int):
    best, best_cost = None, None
    for r in range(start, len(m)):
        x = m[r][col]
        if x.is_zero():
            continue
        c = _cost(x)
        if best is None or c < best_cost:
            best, best_cost = r, c
            if c == (0, 0):
                break
    return best


def echelon(m: Matrix):
    """Reduced row echelon form over the function field.

    Returns ``(rows, pivots, det_factor)`` where ``det_factor`` is the product
    of pivots times the permutation sign (the determinant when ``m`` is square
    and of full rank).
    """
    a = [list(row) for row in m]
    nrows, ncols = shape(a)
    pivots = []
    r = 0
    det = ONE
    for c in range(ncols):
        if r >= nrows:
            break
        p = _find_pivot(a, c, r)
        if p is None:
            continue
        if p != r:
            a[r], a[p] = a[p], a[r]
            det = -det
        piv = a[r][c]
        det = det * piv
        if piv != ONE:
            inv = ONE / piv
            a[r] = [x * inv if not x.is_zero() else x for x in a[r]]
        for i in range(nrows):
            if i == r:
                continue
            f = a[i][c]
            if f.is_zero():
                continue
            ar = a[r]
            a[i] = [x - f * y if not y.is_zero() else x for x, y in zip(a[i], ar)]
        pivots.append(c)
        r += 1
    return a, pivots, det


def rank(m: Matrix) -> int:
    if not m:
        return 0
    return len(echelon(m)[1])


def determinant(m: Matrix) -> Scalar:
    n, k = shape(m)
    if n != k:
        raise ValueError("determinant of a non-square matrix")
    if n == 0:
        return ONE
    _, pivots, det = echelon(m)
    return det if len(pivots) == n else ZERO


def matrix_inverse(m: Matrix):
    """Inverse and determinant of a square Scalar matrix.

    Raises SingularMatrixError when the determinant is identically zero.
    """
    n, k = shape(m)
    if n != k:
        raise ValueError("inverse of a non-square matrix")
    aug = [list(row) + [ONE if i == j else ZERO for j in range(n)] for i, row in enumerate(m)]
    a, pivots, det = echelon(aug)
    if pivots[:n] != list(range(n)) or len(pivots) < n:
        raise SingularMatrixError("matrix is singular (determinant is identically zero)", det=ZERO)
    inv = [row[n:] for row in a[:n]]
    return inv, det


def nullspace(m: Matrix) -> List[List[Scalar]]:
    """Basis of ``{v : m v = 0}`` over the function field."""
    nrows, ncols = shape(m)
    if nrows == 0:
        return [[ONE if i == j else ZERO for i in range(ncols)] for j in range(ncols)]
    a, pivots, _ = echelon(m)
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for f in free:
        v = [ZERO] * ncols
        v[f] = ONE
        for r, pc in enumerate(pivots):
            v[pc] = -a[r][f]
        basis.append(v)
    return basis


def row_span_contains(reduced, pivots, vec) -> bool:
    """Whether ``vec`` lies in the row space of an already-reduced matrix."""
    v = list(vec)
    for r, pc in enumerate(pivots):
        f = v[pc]
        if f.is_zero():
            continue
        v = [x - f * y for x, y in zip(v, reduced[r])]
    return all(x.is_zero() for x in v)


def same_row_space(a: Matrix, b: Matrix) -> bool:
    """Row spaces agree over the function field (rank of the stack equals both ranks)."""
    ra, rb = rank(a), rank(b)
    if ra != rb:
        return False
    return rank(a + b) == ra

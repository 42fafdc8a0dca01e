"""Exact rational arithmetic helpers: parsing, formatting, elimination.

Every numeric quantity in the toolkit is a ``fractions.Fraction``. Floats
never enter any computation, so rank decisions and solved flows carry no
tolerance at all.
"""

from __future__ import annotations

from fractions import Fraction

from .errors import InconsistentSystemError, SingularSystemError

Matrix = list[list[Fraction]]
Vector = list[Fraction]

ZERO = Fraction(0)
ONE = Fraction(1)


def parse_fraction(text: str) -> Fraction:
    """Parse ``"7/3"``, ``"-4"`` or an exact decimal such as ``"0.25"``."""
    token = text.strip()
    if not token:
        raise ValueError("empty rational literal")
    # Fraction accepts both p/q and decimal strings; both convert exactly.
    return Fraction(token)


def format_fraction(value: Fraction) -> str:
    """Canonical text form: ``"4"`` for integers, ``"p/q"`` otherwise."""
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


def copy_matrix(matrix: Matrix) -> Matrix:
    return [row[:] for row in matrix]


def echelon(matrix: Matrix, rhs: Vector | None = None) -> tuple[int, list[int]]:
    """Reduce ``matrix`` (and ``rhs`` alongside it) in place.

    Returns ``(rank, pivot_columns)``. Elimination is plain fraction
    arithmetic with first-nonzero pivoting; there is no stability concern
    because everything is exact.
    """
    if rhs is not None and len(rhs) != len(matrix):
        raise ValueError("rhs length does not match row count")
    rows = len(matrix)
    cols = len(matrix[0]) if rows else 0
    pivots: list[int] = []
    r = 0
    for c in range(cols):
        pivot_row = next((i for i in range(r, rows) if matrix[i][c] != 0), None)
        if pivot_row is None:
            continue
        if pivot_row != r:
            matrix[r], matrix[pivot_row] = matrix[pivot_row], matrix[r]
            if rhs is not None:
                rhs[r], rhs[pivot_row] = rhs[pivot_row], rhs[r]
        pivot = matrix[r][c]
        for i in range(r + 1, rows):
            factor = matrix[i][c]
            if factor == 0:
                continue
            scale = factor / pivot
            row_i = matrix[i]
            row_r = matrix[r]
            for j in range(c, cols):
                row_i[j] -= scale * row_r[j]
            if rhs is not None:
                rhs[i] -= scale * rhs[r]
        pivots.append(c)
        r += 1
        if r == rows:
            break
    return r, pivots


def matrix_rank(matrix: Matrix) -> int:
    if not matrix:
        return 0
    work = copy_matrix(matrix)
    rank, _ = echelon(work)
    return rank


def solve_unique(matrix: Matrix, rhs: Vector) -> Vector:
    """Solve ``matrix @ x = rhs`` when the matrix has full column rank.

    Raises SingularSystemError when columns are dependent and
    InconsistentSystemError when the (possibly overdetermined) system has
    no solution. Extra rows beyond the rank act as consistency checks.
    """
    rows = len(matrix)
    cols = len(matrix[0]) if rows else 0
    work = copy_matrix(matrix)
    b = list(rhs)
    rank, pivots = echelon(work, b)
    if rank < cols:
        raise SingularSystemError(f"rank {rank} < {cols} columns")
    for i in range(rank, rows):
        if b[i] != 0:
            raise InconsistentSystemError("zero row with nonzero right-hand side")
    x: Vector = [ZERO] * cols
    for i in range(rank - 1, -1, -1):
        c = pivots[i]
        acc = b[i]
        row = work[i]
        for j in range(c + 1, cols):
            if row[j] != 0:
                acc -= row[j] * x[j]
        x[c] = acc / row[c]
    return x


def general_solution(matrix: Matrix, rhs: Vector) -> tuple[Vector, list[Vector]]:
    """Particular solution plus a nullspace basis for ``matrix @ x = rhs``.

    Free variables are pinned to zero in the particular solution; each basis
    vector sets one free variable to one. Raises InconsistentSystemError
    when no solution exists.
    """
    rows = len(matrix)
    cols = len(matrix[0]) if rows else 0
    work = copy_matrix(matrix)
    b = list(rhs)
    rank, pivots = echelon(work, b)
    for i in range(rank, rows):
        if b[i] != 0:
            raise InconsistentSystemError("no solution: inconsistent system")
    pivot_set = set(pivots)
    free_cols = [c for c in range(cols) if c not in pivot_set]

    def back_substitute(target: Vector, fixed: dict[int, Fraction]) -> Vector:
        x: Vector = [ZERO] * cols
        for c, value in fixed.items():
            x[c] = value
        for i in range(rank - 1, -1, -1):
            c = pivots[i]
            acc = target[i]
            row = work[i]
            for j in range(c + 1, cols):
                if row[j] != 0:
                    acc -= row[j] * x[j]
            x[c] = acc / row[c]
        return x

    particular = back_substitute(b, {c: ZERO for c in free_cols})
    basis: list[Vector] = []
    zero_rhs: Vector = [ZERO] * rows
    for free in free_cols:
        fixed = {c: (ONE if c == free else ZERO) for c in free_cols}
        basis.append(back_substitute(zero_rhs, fixed))
    return particular, basis

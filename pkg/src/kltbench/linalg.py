"""Exact linear algebra over the integers and rationals.

Everything here is fraction-free (Bareiss) elimination on Python ints, so the
results are exact.  Matrices are plain lists of rows.
"""

from __future__ import annotations

from fractions import Fraction
import math
from typing import Sequence

Matrix = Sequence[Sequence[int]]


class SingularMatrixError(ValueError):
    pass


def _check_square(m: Matrix) -> int:
    n = len(m)
    for row in m:
        if len(row) != n:
            raise ValueError("matrix is not square")
    return n


def leading_minors(m: Matrix) -> list[int]:
    """Return det of the leading k x k submatrices, k = 1..n.

    One Bareiss pass yields all of them: with no row exchanges the k-th pivot
    is exactly the k-th leading principal minor.  A zero pivot means that
    minor vanishes; the remaining minors are then computed directly.
    """
    n = _check_square(m)
    a = [[int(x) for x in row] for row in m]
    minors: list[int] = []
    prev = 1
    for k in range(n):
        pivot = a[k][k]
        if pivot == 0:
            minors.append(0)
            minors.extend(determinant([row[: j + 1] for row in m[: j + 1]]) for j in range(k + 1, n))
            return minors
        minors.append(pivot)
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * pivot - a[i][k] * a[k][j]) // prev
        prev = pivot
    return minors


def determinant(m: Matrix) -> int:
    """Exact integer determinant by Bareiss elimination with row pivoting."""
    n = _check_square(m)
    if n == 0:
        return 1
    a = [[int(x) for x in row] for row in m]
    sign = 1
    prev = 1
    for k in range(n - 1):
        if a[k][k] == 0:
            for i in range(k + 1, n):
                if a[i][k] != 0:
                    a[k], a[i] = a[i], a[k]
                    sign = -sign
                    break
            else:
                return 0
        pivot = a[k][k]
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * pivot - a[i][k] * a[k][j]) // prev
        prev = pivot
    return sign * a[n - 1][n - 1]


def solve(m: Matrix, rhs: Sequence) -> list[Fraction]:
    """Solve ``m x = rhs`` exactly.

    The system is scaled to integers, reduced fraction-free to upper
    triangular form, and back-substituted in rationals.
    """
    n = _check_square(m)
    if len(rhs) != n:
        raise ValueError("right-hand side has wrong length")
    rhs = [Fraction(x) for x in rhs]
    scale = 1
    for x in rhs:
        scale = math.lcm(scale, x.denominator)
    a = [[int(m[i][j]) for j in range(n)] + [int(rhs[i] * scale)] for i in range(n)]
    prev = 1
    for k in range(n):
        if a[k][k] == 0:
            for i in range(k + 1, n):
                if a[i][k] != 0:
                    a[k], a[i] = a[i], a[k]
                    break
            else:
                raise SingularMatrixError("matrix is singular")
        pivot = a[k][k]
        for i in range(k + 1, n):
            for j in range(k + 1, n + 1):
                a[i][j] = (a[i][j] * pivot - a[i][k] * a[k][j]) // prev
            a[i][k] = 0
        prev = pivot
    x = [Fraction(0)] * n
    for i in range(n - 1, -1, -1):
        s = Fraction(a[i][n]) - sum(a[i][j] * x[j] for j in range(i + 1, n))
        x[i] = s / a[i][i]
    return [xi / scale for xi in x]


def matvec(m: Matrix, v: Sequence) -> list:
    return [sum(mij * vj for mij, vj in zip(row, v)) for row in m]

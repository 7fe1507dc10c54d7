"""Small dense linear algebra over Fractions or floats (lists of lists).

numpy's solvers are float-only; these work for both scalar kinds so the
exact pipelines never round.
"""
from __future__ import annotations

from fractions import Fraction


class SingularMatrix(ArithmeticError):
    pass


def identity(n, one=Fraction(1)):
    zero = one - one
    return [[one if i == j else zero for j in range(n)] for i in range(n)]


def matmul(a, b):
    m = len(b[0])
    return [[sum((a[i][k] * b[k][j] for k in range(len(b))), a[i][0] * 0) for j in range(m)] for i in range(len(a))]


def matvec(a, v):
    return [sum((a[i][k] * v[k] for k in range(len(v))), v[0] * 0) for i in range(len(a))]


def _pivot_ok(x, tol):
    return x != 0 if tol == 0 else abs(x) > tol


def det(a, tol=0.0):
    n = len(a)
    m = [list(r) for r in a]
    d = m[0][0] ** 0
    for c in range(n):
        piv = max(range(c, n), key=lambda r: abs(m[r][c])) if tol else next(
            (r for r in range(c, n) if m[r][c] != 0), None
        )
        if piv is None or not _pivot_ok(m[piv][c], tol):
            return m[0][0] * 0
        if piv != c:
            m[c], m[piv] = m[piv], m[c]
            d = -d
        d = d * m[c][c]
        for r in range(c + 1, n):
            f = m[r][c] / m[c][c]
            if f:
                for k in range(c, n):
                    m[r][k] -= f * m[c][k]
    return d


def inverse(a, tol=None):
    """Gauss-Jordan inverse.  Exact for Fractions; partial pivoting and a
    relative tolerance for floats."""
    n = len(a)
    is_float = any(isinstance(x, float) for row in a for x in row)
    if tol is None:
        tol = 1e-14 * max(1.0, max(abs(x) for row in a for x in row)) if is_float else 0
    one = 1.0 if is_float else Fraction(1)
    m = [list(row) + identity(n, one)[i] for i, row in enumerate(a)]
    for c in range(n):
        if is_float:
            piv = max(range(c, n), key=lambda r: abs(m[r][c]))
        else:
            piv = next((r for r in range(c, n) if m[r][c] != 0), c)
        if not _pivot_ok(m[piv][c], tol):
            raise SingularMatrix("matrix is singular")
        m[c], m[piv] = m[piv], m[c]
        p = m[c][c]
        m[c] = [x / p for x in m[c]]
        for r in range(n):
            if r != c and m[r][c]:
                f = m[r][c]
                m[r] = [x - f * y for x, y in zip(m[r], m[c])]
    return [row[n:] for row in m]

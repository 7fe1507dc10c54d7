"""Formal 2-jet groups and the graded Lie algebra pgl(n+1) = m + gl(n) + m*.

Elements are plain immutable tuples of Fractions (or floats).  Matrices are
row-major: ``a_upper[i][j]`` is a^i_j, ``a_sym[i][j][k]`` is a^i_{jk}.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from . import _linalg
from ._linalg import SingularMatrix
from .affine import DimensionMismatch


class UpperNotIdentity(ValueError):
    pass


def _t2(m):
    return tuple(tuple(r) for r in m)


def _t3(g):
    return tuple(tuple(tuple(r) for r in p) for p in g)


def _zero3(n, z=Fraction(0)):
    return tuple(tuple((z,) * n for _ in range(n)) for _ in range(n))


@dataclass(frozen=True)
class G2Element:
    """(a^i_j, a^i_{jk}) with no symmetry imposed on the lower indices."""

    a_upper: tuple
    a_sym: tuple

    def __post_init__(self):
        object.__setattr__(self, "a_upper", _t2(self.a_upper))
        object.__setattr__(self, "a_sym", _t3(self.a_sym))

    @property
    def n(self):
        return len(self.a_upper)

    @classmethod
    def identity(cls, n):
        return cls(_linalg.identity(n), _zero3(n))


@dataclass(frozen=True)
class H2Element:
    """(a^i_j, a_j); embeds as a^i_{jk} = −(a^i_j a_k + a_j a^i_k)."""

    a_upper: tuple
    a_low: tuple

    def __post_init__(self):
        object.__setattr__(self, "a_upper", _t2(self.a_upper))
        object.__setattr__(self, "a_low", tuple(self.a_low))

    @property
    def n(self):
        return len(self.a_upper)


@dataclass(frozen=True)
class PglElement:
    """(v, U, ξ) in m + gl(n) + m*."""

    v: tuple
    U: tuple
    xi: tuple

    def __post_init__(self):
        object.__setattr__(self, "v", tuple(self.v))
        object.__setattr__(self, "U", _t2(self.U))
        object.__setattr__(self, "xi", tuple(self.xi))

    @property
    def n(self):
        return len(self.v)

    def __add__(self, o):
        n = self.n
        return PglElement(
            [self.v[i] + o.v[i] for i in range(n)],
            [[self.U[i][j] + o.U[i][j] for j in range(n)] for i in range(n)],
            [self.xi[i] + o.xi[i] for i in range(n)],
        )

    def is_zero(self):
        return (all(x == 0 for x in self.v) and all(x == 0 for r in self.U for x in r)
                and all(x == 0 for x in self.xi))


def _same(a, b):
    if a.n != b.n:
        raise DimensionMismatch(f"dimensions differ: {a.n} vs {b.n}")


def g2_mul(a: G2Element, b: G2Element) -> G2Element:
    """(a^i_l b^l_j, a^i_l b^l_{jk} + a^i_{lm} b^l_j b^m_k)."""
    _same(a, b)
    n = a.n
    A, As, B, Bs = a.a_upper, a.a_sym, b.a_upper, b.a_sym
    up = _linalg.matmul(A, B)
    sym = [[[
        sum(A[i][l] * Bs[l][j][k] for l in range(n))
        + sum(As[i][l][m] * B[l][j] * B[m][k] for l in range(n) for m in range(n))
        for k in range(n)] for j in range(n)] for i in range(n)]
    return G2Element(up, sym)


def g2_inverse(a: G2Element) -> G2Element:
    """b = a⁻¹: b^i_j = (A⁻¹)^i_j and b^i_{jk} = −(A⁻¹)^i_l a^l_{pq} b^p_j b^q_k."""
    n = a.n
    Ai = _linalg.inverse([list(r) for r in a.a_upper])
    As = a.a_sym
    sym = [[[
        -sum(Ai[i][l] * As[l][p][q] * Ai[p][j] * Ai[q][k]
             for l in range(n) for p in range(n) for q in range(n))
        for k in range(n)] for j in range(n)] for i in range(n)]
    return G2Element(Ai, sym)


def h2_embed(h: H2Element) -> G2Element:
    n = h.n
    A, a = h.a_upper, h.a_low
    sym = [[[-(A[i][j] * a[k] + a[j] * A[i][k]) for k in range(n)] for j in range(n)] for i in range(n)]
    return G2Element(A, sym)


def h2_extract(g: G2Element):
    """Inverse of :func:`h2_embed`; ``None`` if ``g`` is not of H² shape.

    Contracting a^i_{jk} = −(a^i_j a_k + a_j a^i_k) with (A⁻¹)^j_i gives
    −(n+1) a_k.
    """
    n = g.n
    Ai = _linalg.inverse([list(r) for r in g.a_upper])
    low = [-sum(Ai[j][i] * g.a_sym[i][j][k] for i in range(n) for j in range(n)) / (n + 1) for k in range(n)]
    h = H2Element(g.a_upper, low)
    return h if h2_embed(h) == g else None


def h2_mul(a: H2Element, b: H2Element) -> H2Element:
    """Product computed inside G̃², so that h2_embed is a homomorphism by
    construction: (A, a)(B, b) = (AB, b + aB)."""
    _same(a, b)
    n = a.n
    up = _linalg.matmul(a.a_upper, b.a_upper)
    low = [b.a_low[k] + sum(a.a_low[l] * b.a_upper[l][k] for l in range(n)) for k in range(n)]
    return H2Element(up, low)


def pgl_bracket(X: PglElement, Y: PglElement) -> PglElement:
    """Bracket in pgl(n+1) with the grading m ⊕ gl(n) ⊕ m*.

    [u,v] = [u*,v*] = 0, [U,u] = Uu, [u*,U] = u*U, [U,V] = UV − VU and
    [u,u*] = uu* + (u*u)I, extended bilinearly.
    """
    _same(X, Y)
    n = X.n
    u, U, us = X.v, X.U, X.xi
    v, V, vs = Y.v, Y.U, Y.xi
    z = (u + v + us + vs + (Fraction(0),))[0] * 0
    m = [sum((U[i][k] * v[k] - V[i][k] * u[k] for k in range(n)), z) for i in range(n)]
    us_v = sum((us[k] * v[k] for k in range(n)), z)
    vs_u = sum((vs[k] * u[k] for k in range(n)), z)
    g = [[
        u[i] * vs[j] - v[i] * us[j]
        + sum((U[i][k] * V[k][j] - V[i][k] * U[k][j] for k in range(n)), z)
        + ((vs_u - us_v) if i == j else z)
        for j in range(n)] for i in range(n)]
    ms = [sum((us[k] * V[k][j] - vs[k] * U[k][j] for k in range(n)), z) for j in range(n)]
    return PglElement(m, g, ms)


def h_action_2jet(h: H2Element):
    """First and second Taylor coefficients at 0 of x ↦ Ax/(a·x + 1).

    Returns (linear, quadratic) with quadratic^i_{jk} the symmetric
    coefficient of x^j x^k, namely −½(a^i_j a_k + a^i_k a_j).  Twice the
    quadratic part is the Hessian, which equals the H²-coordinate a^i_{jk}
    of :func:`h2_embed` symmetrized in (j, k).
    """
    n = h.n
    A, a = h.a_upper, h.a_low
    half = Fraction(1, 2) if all(isinstance(x, (int, Fraction)) for x in a) else 0.5
    quad = tuple(tuple(tuple(-half * (A[i][j] * a[k] + A[i][k] * a[j]) for k in range(n))
                       for j in range(n)) for i in range(n))
    return _t2(A), quad


def h_action(h: H2Element, x):
    """The fractional-linear action itself (used as a numeric oracle)."""
    n = h.n
    den = sum(h.a_low[j] * x[j] for j in range(n)) + 1
    return tuple(sum(h.a_upper[i][j] * x[j] for j in range(n)) / den for i in range(n))


def section_action(gamma, h: H2Element):
    """Γ' from (I, −Γ)·h for h = (I, a) in H²: Γ'^i_{jk} = Γ^i_{jk} + δ^i_j a_k + δ^i_k a_j.

    ``gamma`` is a constant n×n×n grid.
    """
    n = h.n
    if any(h.a_upper[i][j] != (1 if i == j else 0) for i in range(n) for j in range(n)):
        raise UpperNotIdentity("section action is defined here for a^i_j = δ^i_j")
    frame = G2Element(_linalg.identity(n), [[[-gamma[i][j][k] for k in range(n)] for j in range(n)] for i in range(n)])
    moved = g2_mul(frame, h2_embed(h))
    return _t3([[[-moved.a_sym[i][j][k] for k in range(n)] for j in range(n)] for i in range(n)])

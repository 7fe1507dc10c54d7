"""T²-invariant curvature-free projective structures on the 2-torus.

A constant normal projective connection in dimension 2 is fixed by the six
free upper coefficients τ = (Π¹₁₂, Π¹₂₁, Π¹₂₂, Π²₁₁, Π²₁₂, Π²₂₁); the rest
follow from the trace conditions and normality.  The structure is
curvature-free exactly when the two cubics F(τ), G(τ) vanish.

Scalars may be Fractions, floats or sympy expressions; the arithmetic here
is written so any of them goes through.
"""
from __future__ import annotations

import math
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import List, NamedTuple, Optional

import numpy as np

from .affine import AffineConnection


class Tau(NamedTuple):
    p1_12: object
    p1_21: object
    p1_22: object
    p2_11: object
    p2_12: object
    p2_21: object


TAU_LABELS = ("Pi^1_12", "Pi^1_21", "Pi^1_22", "Pi^2_11", "Pi^2_12", "Pi^2_21")


class ConvergenceFailure(RuntimeError):
    pass


class InvalidBranch(ValueError):
    pass


@dataclass(frozen=True)
class CompletedTau:
    tau: Tau
    p1_11: object
    p2_22: object
    lower: tuple  # ((Π₁₁, Π₁₂), (Π₂₁, Π₂₂))

    def upper(self):
        """Π^i_{jk} as a 2x2x2 nested tuple (0-based)."""
        t = self.tau
        return (
            ((self.p1_11, t.p1_12), (t.p1_21, t.p1_22)),
            ((t.p2_11, t.p2_12), (t.p2_21, self.p2_22)),
        )


def _half(x):
    try:
        import sympy

        if isinstance(x, sympy.Basic):
            return sympy.Rational(1, 2)
    except ImportError:  # pragma: no cover
        pass
    return 0.5 if isinstance(x, float) else Fraction(1, 2)


def complete_tau(t) -> CompletedTau:
    t = Tau(*t)
    a12, a21, a22, b11, b12, b21 = t
    h = _half(a12 + b12)
    p111 = -(b21 + b12) * h
    p222 = -(a12 + a21) * h
    P11 = -b12 * p111 - p222 * b11 + a12 * b11 + b12 * b21
    P12 = -b12 * a21 + a22 * b11
    P22 = -p111 * a22 - a21 * p222 + a21 * a12 + b21 * a22
    return CompletedTau(t, p111, p222, ((P11, P12), (P12, P22)))


# Expanded cubics: (coefficient, exponent vector over τ).
def _mono(c, *idx):
    e = [0] * 6
    for i in idx:
        e[i] += 1
    return (Fraction(c), tuple(e))


# indices: 0=Π¹₁₂ 1=Π¹₂₁ 2=Π¹₂₂ 3=Π²₁₁ 4=Π²₁₂ 5=Π²₂₁
F_TERMS = (
    _mono(Fraction(1, 2), 4, 4, 0),
    _mono(Fraction(3, 2), 4, 5, 0),
    _mono(Fraction(3, 2), 0, 3, 0),
    _mono(Fraction(-3, 2), 4, 1, 4),
    _mono(Fraction(-1, 2), 4, 1, 5),
    _mono(1, 2, 3, 4),
    _mono(Fraction(-1, 2), 1, 1, 3),
    _mono(-1, 1, 0, 3),
    _mono(-1, 5, 2, 3),
)
G_TERMS = (
    _mono(Fraction(-1, 2), 1, 1, 5),
    _mono(Fraction(-3, 2), 1, 0, 5),
    _mono(Fraction(-3, 2), 5, 2, 5),
    _mono(Fraction(3, 2), 1, 4, 1),
    _mono(Fraction(1, 2), 1, 4, 0),
    _mono(-1, 3, 2, 1),
    _mono(Fraction(1, 2), 4, 4, 2),
    _mono(1, 4, 5, 2),
    _mono(1, 0, 3, 2),
)


def _coef(c, sample):
    if isinstance(sample, float):
        return float(c)
    try:
        import sympy

        if isinstance(sample, sympy.Basic):
            return sympy.Rational(c.numerator, c.denominator)
    except ImportError:  # pragma: no cover
        pass
    return c


def _poly(terms, t):
    t = tuple(t)
    acc = 0
    for c, e in terms:
        m = _coef(c, t[0] + t[1] + t[2] + t[3] + t[4] + t[5])
        for i, k in enumerate(e):
            if k:
                m = m * t[i] ** k
        acc = acc + m
    return acc


def _dpoly(terms, t, var):
    acc = 0
    for c, e in terms:
        k = e[var]
        if not k:
            continue
        m = _coef(c, t[0] + t[1] + t[2] + t[3] + t[4] + t[5]) * k
        for i, p in enumerate(e):
            q = p - 1 if i == var else p
            if q:
                m = m * t[i] ** q
        acc = acc + m
    return acc


def F_G(t):
    """The two cubics (F(τ), G(τ)) whose common zeros are the curvature-free
    structures."""
    t = Tau(*t)
    return _poly(F_TERMS, t), _poly(G_TERMS, t)


def has_torsion(t) -> bool:
    t = Tau(*t)
    return t.p1_12 != t.p1_21 or t.p2_12 != t.p2_21


def torsion_of(t):
    """(K¹₁₂, K²₁₂) = (Π¹₂₁ − Π¹₁₂, Π²₂₁ − Π²₁₂)."""
    t = Tau(*t)
    return (t.p1_21 - t.p1_12, t.p2_21 - t.p2_12)


def jacobian(t):
    """2x6 matrix of partials of (F, G) with respect to τ."""
    t = Tau(*t)
    return [[_dpoly(F_TERMS, t, v) for v in range(6)], [_dpoly(G_TERMS, t, v) for v in range(6)]]


def gammas_from_tau(ct: CompletedTau, nu=(0, 0)) -> AffineConnection:
    """Constant connection Γ^i_{jk} = Π^i_{jk} − (δ^i_j ν_k + δ^i_k ν_j)."""
    P = ct.upper()
    G = [[[P[i][j][k] - ((nu[k] if i == j else 0) + (nu[j] if i == k else 0)) for k in range(2)]
          for j in range(2)] for i in range(2)]
    return AffineConnection(2, G)


# ---------------------------------------------------------------------------
# sampling


@dataclass
class VarietySample:
    tau: Tau
    F: float
    G: float
    residual: float
    rank: int
    singular_values: tuple
    has_torsion: bool
    iterations: int
    start: tuple


RANK_TOL = 1e-8


def jacobian_rank(t, tol=RANK_TOL):
    s = np.linalg.svd(np.array(jacobian([float(x) for x in t]), dtype=float), compute_uv=False)
    return int(np.sum(s > tol)), tuple(float(x) for x in s)


def newton_project(start, tol=1e-12, max_iter=100):
    """Gauss-Newton with pseudo-inverse steps towards F = G = 0.

    Returns (τ, residual, iterations) or raises ConvergenceFailure.
    """
    x = np.array([float(v) for v in start], dtype=float)
    for it in range(max_iter + 1):
        r = np.array(F_G(x.tolist()), dtype=float)
        res = float(np.max(np.abs(r)))
        if not math.isfinite(res):
            break
        if res <= tol:
            return Tau(*x.tolist()), res, it
        if it == max_iter:
            break
        J = np.array(jacobian(x.tolist()), dtype=float)
        x = x - np.linalg.pinv(J) @ r
    raise ConvergenceFailure(f"no convergence from {tuple(start)} after {max_iter} iterations")


def solve_variety(seed: int, count: int, tol: float = 1e-12, max_iter: int = 100,
                  box: float = 2.0) -> List[VarietySample]:
    """Project ``count`` random starts in [-box, box]^6 onto the variety.

    Starts that fail to converge are skipped; if all fail, raises
    ConvergenceFailure.
    """
    if count < 1:
        raise ValueError("count must be at least 1")
    rng = random.Random(seed)
    out = []
    for _ in range(count):
        start = tuple(rng.uniform(-box, box) for _ in range(6))
        try:
            t, res, its = newton_project(start, tol, max_iter)
        except ConvergenceFailure:
            continue
        f, g = F_G(t)
        rank, sv = jacobian_rank(t)
        out.append(VarietySample(t, f, g, res, rank, sv, has_torsion(t), its, start))
    if not out:
        raise ConvergenceFailure("every start failed to converge")
    return out


# ---------------------------------------------------------------------------
# example families


@dataclass
class FamilyMember:
    tau: Tau
    completed: CompletedTau
    alpha: tuple  # α^i_{jk} of the normal TW connection (= Π^i_{jk})
    beta: tuple  # β_{jk} = −3 Π_{jk}
    torsion: tuple  # Cartan torsion (K¹₁₂, K²₁₂)
    tw_torsion: tuple  # coefficient of ρ^i on dx¹∧dx², = −K^i/3
    branch: str = ""


def _member(t, branch=""):
    ct = complete_tau(t)
    L = ct.lower
    beta = tuple(tuple(-3 * L[j][k] for k in range(2)) for j in range(2))
    K = torsion_of(t)
    third = _third(K[0] + K[1])
    return FamilyMember(Tau(*t), ct, ct.upper(), beta, K, tuple(-k * third for k in K), branch)


def _third(x):
    try:
        import sympy

        if isinstance(x, sympy.Basic):
            return sympy.Rational(1, 3)
    except ImportError:  # pragma: no cover
        pass
    return 1.0 / 3 if isinstance(x, float) else Fraction(1, 3)


def family_first_vanishing(a, b, c) -> FamilyMember:
    """Π¹₁₂ = Π¹₂₁ = Π¹₂₂ = 0 with (Π²₁₁, Π²₁₂, Π²₂₁) = (a, b, c)."""
    z = a * 0
    return _member((z, z, z, a, b, c), "first-vanishing")


def _sincos(theta):
    try:
        import sympy

        if isinstance(theta, sympy.Basic):
            s, c = sympy.sin(theta), sympy.cos(theta)
            return s, c, True
    except ImportError:  # pragma: no cover
        pass
    s, c = math.sin(theta), math.cos(theta)
    # snap round-off at the axes so the case split is decided exactly
    if abs(s) < 1e-15:
        s = 0.0
    if abs(c) < 1e-15:
        c = 0.0
    return s, c, False


def _is0(x, symbolic):
    if symbolic:
        import sympy

        return sympy.simplify(x) == 0
    return x == 0


def family_rotating(theta, branch: int, case: str = "", free=0, scale=1) -> FamilyMember:
    """Π¹₁₂ = −Π¹₂₁ = sinθ, Π²₂₁ = −Π²₁₂ = cosθ.

    branch 1: sinθ = 0, Π¹₂₂ = 0 and Π²₁₁ = ``free``;
    branch 2: cosθ = 0, Π²₁₁ = 0 and Π¹₂₂ = ``free``;
    branch 3: sinθ cosθ ≠ 0, ``case`` "zero" (Π¹₂₂ = Π²₁₁ = 0) or "curved"
    (Π¹₂₂ = sin²θ/cosθ, Π²₁₁ = cos²θ/sinθ).

    ``scale`` multiplies the whole τ; the cubics are homogeneous so the
    member stays on the variety and its torsion scales linearly.
    """
    s, c, symbolic = _sincos(theta)
    if branch == 1:
        if not _is0(s, symbolic):
            raise InvalidBranch("branch 1 needs sin θ = 0")
        p122, p211 = s * 0, free
    elif branch == 2:
        if not _is0(c, symbolic):
            raise InvalidBranch("branch 2 needs cos θ = 0")
        p122, p211 = free, c * 0
    elif branch == 3:
        if _is0(s, symbolic) or _is0(c, symbolic):
            raise InvalidBranch("branch 3 needs sin θ cos θ ≠ 0")
        if case == "zero":
            p122, p211 = s * 0, s * 0
        elif case == "curved":
            p122, p211 = s * s / c, c * c / s
        else:
            raise InvalidBranch("branch 3 needs case 'zero' or 'curved'")
    else:
        raise InvalidBranch(f"unknown branch {branch!r}")
    t = (s, -s, p122, p211, -c, c)
    if scale != 1:
        t = tuple(scale * x for x in t)
    return _member(t, f"rotating/{branch}{('/' + case) if case else ''}")


def example_families(which: str, **params) -> FamilyMember:
    if which == "first-vanishing":
        return family_first_vanishing(params["a"], params["b"], params["c"])
    if which == "rotating":
        return family_rotating(params["theta"], params["branch"], params.get("case", ""),
                         params.get("free", 0), params.get("scale", 1))
    raise InvalidBranch(f"unknown family {which!r}")


SAMPLE_TAU = Tau(Fraction(0), Fraction(0), Fraction(0), Fraction(1), Fraction(1), Fraction(-1))

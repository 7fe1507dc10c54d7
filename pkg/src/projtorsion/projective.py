"""Normal projective connection of an affine connection with torsion.

Given Γ, the reduced torsion μ and the form ν are traces of Γ, the upper
coefficients Π^i_{jk} are Γ shifted by the δ-pattern of ν, and the lower
coefficients Π_{jk} are the unique solution of the Ricci-flatness condition
k^i_{jil} = 0.  Curvature is evaluated pointwise from second-order jets.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Optional

from . import _linalg
from .affine import (
    FLOAT_TOL,
    AffineConnection,
    DimensionMismatch,
    DimensionTooSmall,
    OneForm,
    _grid3,
    delta_pattern,
)
from .fields import (
    EXACT,
    FLOAT,
    ZERO,
    Derived,
    DomainError,
    Jet,
    coerce_point,
    field_jet,
    is_rational_point,
    resolve_mode,
)


class SingularJacobian(ArithmeticError):
    pass


def _is_zero(x, tol=FLOAT_TOL):
    if isinstance(x, Fraction):
        return x == 0
    return abs(x) <= tol


def traces(c: AffineConnection):
    """(Γ^α_{αj}, Γ^α_{jα}) as lists of fields."""
    n, g = c.n, c.gamma
    first, second = [], []
    for j in range(n):
        s1, s2 = ZERO, ZERO
        for a in range(n):
            s1 = s1 + g[a][a][j]
            s2 = s2 + g[a][j][a]
        first.append(s1)
        second.append(s2)
    return first, second


def reduced_torsion(c: AffineConnection, a=1, b=1):
    """(μ, ν) with μ_j = ½(Γ^α_{αj} − Γ^α_{jα}) and
    ν_j = −(aΓ^α_{αj} + bΓ^α_{jα}) / (2(n+1))."""
    n = c.n
    t1, t2 = traces(c)
    mu = OneForm([(t1[j] - t2[j]) / 2 for j in range(n)])
    w = Fraction(-1, 2 * (n + 1))
    a, b = Fraction(a), Fraction(b)
    nu = OneForm([(t1[j] * a + t2[j] * b) * w for j in range(n)])
    return mu, nu


def lower_from_upper_jets(n, P):
    """Solve k^i_{jil} = 0 for Π_{jl} given jets of Π^i_{jk} (order ≥ 1).

    With X_{jl} = ∂_iΠ^i_{jl} − ∂_lΠ^i_{ji} + Π^i_{αi}Π^α_{jl} − Π^i_{αl}Π^α_{ji}
    the condition reads nΠ_{jl} − Π_{lj} = −X_{jl}, whose solution is
    Π_{jl} = −(nX_{jl} + X_{lj})/(n²−1).  Returns jets one order lower.
    """
    X = [[None] * n for _ in range(n)]
    for j in range(n):
        for l in range(n):
            acc = None
            for i in range(n):
                term = P[i][j][l].partial(i) - P[i][j][i].partial(l)
                acc = term if acc is None else acc + term
                for al in range(n):
                    acc = acc + P[i][al][i] * P[al][j][l] - P[i][al][l] * P[al][j][i]
            X[j][l] = acc
    d = n * n - 1
    return [[(X[j][l] * n + X[l][j]) * Fraction(-1, d) if isinstance(X[j][l].value, Fraction)
             else (X[j][l] * n + X[l][j]) * (-1.0 / d) for l in range(n)] for j in range(n)]


class NormalProjectiveData:
    """Normalized coefficients of the projective structure of ``connection``.

    ``pi_upper[i][j][k]`` are expressions; ``pi_lower[j][k]`` are
    :class:`~projtorsion.fields.Derived` fields because they involve first
    derivatives of Γ.
    """

    def __init__(self, connection: AffineConnection, a=1, b=1):
        c = connection
        n = c.n
        if n < 2:
            raise DimensionTooSmall("normalization needs n >= 2")
        self.n = n
        self.connection = c
        self.weights = (Fraction(a), Fraction(b))
        self.mode = c.mode
        self.mu, self.nu = reduced_torsion(c, a, b)
        d = delta_pattern(n, self.nu.components)
        self.pi_upper = _grid3(n, lambda i, j, k: c.gamma[i][j][k] + d[i][j][k])
        self._at = lru_cache(maxsize=256)(self._compute_at)
        rational = c.mode == EXACT
        const = c.is_constant

        def lower(j, k):
            return Derived(lambda pt, mode: self._at(pt, mode)[1][j][k], f"Pi_{j + 1}{k + 1}", rational, const)

        self.pi_lower = tuple(tuple(lower(j, k) for k in range(n)) for j in range(n))

    def _compute_at(self, pt, mode):
        n = self.n
        P = [[[field_jet(f, pt, mode) for f in row] for row in plane] for plane in self.pi_upper]
        return P, lower_from_upper_jets(n, P)

    def resolve(self, p, mode=None):
        p = tuple(p)
        if len(p) != self.n:
            raise DimensionMismatch(f"point has {len(p)} coordinates, expected {self.n}")
        if mode is None:
            mode = self.mode if is_rational_point(p) else FLOAT
        return coerce_point(p, mode), mode

    def jets_at(self, p, mode=None):
        """(Π^i_{jk} jets of order 2, Π_{jk} jets of order 1) at ``p``."""
        pt, mode = self.resolve(p, mode)
        return self._at(pt, mode)

    def upper_values(self, p, mode=None):
        P, _ = self.jets_at(p, mode)
        return [[[x.value for x in row] for row in plane] for plane in P]

    def lower_values(self, p, mode=None):
        _, L = self.jets_at(p, mode)
        return [[x.value for x in row] for row in L]

    def __repr__(self):
        return f"NormalProjectiveData(n={self.n}, mode={self.mode})"


def normalize(c: AffineConnection, a=1, b=1) -> NormalProjectiveData:
    return NormalProjectiveData(c, a, b)


@dataclass
class CurvatureReport:
    """Pulled-back torsion and curvature at a point (0-based indices).

    K_torsion[i][k][l] = K^i_{kl}, k_curv[i][j][k][l] = k^i_{jkl},
    omega_lower[j][k][l] = K_{jkl}.  ``torsion_derivative[i][m][k][l]`` is
    ∂_m K^i_{kl} + Π^i_{jm} K^j_{kl}, the coefficient of dΩ^i + ω^i_j∧Ω^j
    before antisymmetrization.
    """

    point: tuple
    n: int
    K_torsion: list
    k_curv: list
    omega_lower: list
    torsion_derivative: list
    mode: str
    normal: bool = field(default=True)

    def blocks(self):
        return {"K": self.K_torsion, "k": self.k_curv, "K_lower": self.omega_lower}

    def max_abs(self, which):
        return _max_abs(self.blocks()[which])

    def torsion_vanishes(self, tol=FLOAT_TOL):
        return _all_zero(self.K_torsion, tol)

    def curvature_vanishes(self, tol=FLOAT_TOL):
        return _all_zero(self.k_curv, tol) and _all_zero(self.omega_lower, tol)

    def vanishes(self, tol=FLOAT_TOL):
        return self.torsion_vanishes(tol) and self.curvature_vanishes(tol)

    def normality_residual(self):
        n = self.n
        return max(
            (abs(sum(self.k_curv[i][j][i][l] for i in range(n))) for j in range(n) for l in range(n)),
            default=0,
        )


def _flat(x):
    if isinstance(x, (list, tuple)):
        for y in x:
            yield from _flat(y)
    else:
        yield x


def _max_abs(grid):
    return max((abs(v) for v in _flat(grid)), default=0)


def _all_zero(grid, tol=FLOAT_TOL):
    return all(_is_zero(v, tol) for v in _flat(grid))


def curvature_from_jets(n, P, L, point=(), mode=EXACT) -> CurvatureReport:
    """Torsion and curvature blocks from jets of Π^i_{jk} (order ≥ 1) and
    Π_{jk} (order ≥ 1), whatever produced them."""
    pv = [[[x.value for x in row] for row in plane] for plane in P]
    dP = [[[[P[i][j][k].partial(m).value for m in range(n)] for k in range(n)] for j in range(n)] for i in range(n)]
    lv = [[x.value for x in row] for row in L]
    dL = [[[L[j][k].partial(m).value for m in range(n)] for k in range(n)] for j in range(n)]
    zero = pv[0][0][0] * 0

    K = [[[pv[i][l][k] - pv[i][k][l] for l in range(n)] for k in range(n)] for i in range(n)]
    k_curv = [[[[zero] * n for _ in range(n)] for _ in range(n)] for _ in range(n)]
    for i in range(n):
        for j in range(n):
            for k in range(n):
                for l in range(n):
                    v = dP[i][j][l][k] - dP[i][j][k][l]
                    for a in range(n):
                        v += pv[i][a][k] * pv[a][j][l] - pv[i][a][l] * pv[a][j][k]
                    if i == k:
                        v += lv[j][l]
                    if i == l:
                        v -= lv[j][k]
                    if i == j:
                        v -= lv[l][k] - lv[k][l]
                    k_curv[i][j][k][l] = v
    KL = [[[zero] * n for _ in range(n)] for _ in range(n)]
    for j in range(n):
        for k in range(n):
            for l in range(n):
                v = dL[j][l][k] - dL[j][k][l]
                for a in range(n):
                    v += lv[a][k] * pv[a][j][l] - lv[a][l] * pv[a][j][k]
                KL[j][k][l] = v
    # derivative of the torsion form, for the first Bianchi identity
    C = [[[[zero] * n for _ in range(n)] for _ in range(n)] for _ in range(n)]
    for i in range(n):
        for m in range(n):
            for k in range(n):
                for l in range(n):
                    v = (dP[i][l][k][m] - dP[i][k][l][m])
                    for j in range(n):
                        v += pv[i][j][m] * K[j][k][l]
                    C[i][m][k][l] = v
    rep = CurvatureReport(tuple(point), n, K, k_curv, KL, C, mode)
    rep.normal = _is_zero(rep.normality_residual())
    return rep


def curvature(d: NormalProjectiveData, p, mode=None) -> CurvatureReport:
    pt, mode = d.resolve(p, mode)
    P, L = d._at(pt, mode)
    return curvature_from_jets(d.n, P, L, pt, mode)


def constant_jets(n, upper, lower):
    """Wrap constant coefficient grids as jets (all derivatives zero)."""
    P = [[[Jet.constant(upper[i][j][k], n) for k in range(n)] for j in range(n)] for i in range(n)]
    L = [[Jet.constant(lower[j][k], n) for k in range(n)] for j in range(n)]
    return P, L


def is_flat(d: NormalProjectiveData, samples, mode=None, tol=FLOAT_TOL) -> bool:
    samples = list(samples)
    if not samples:
        raise ValueError("need at least one sample point")
    return all(curvature(d, p, mode).vanishes(tol) for p in samples)


def hlavaty(c: AffineConnection):
    """Φ^i_{jk} = Γ^i_{jk} + (δ^i_j(Γ^α_{kα} − nΓ^α_{αk}) + δ^i_k(Γ^α_{αj} − nΓ^α_{jα}))/(n²−1)."""
    n = c.n
    if n < 2:
        raise DimensionTooSmall("needs n >= 2")
    t1, t2 = traces(c)
    w = Fraction(1, n * n - 1)

    def entry(i, j, k):
        e = c.gamma[i][j][k]
        if i == j:
            e = e + (t2[k] - t1[k] * n) * w
        if i == k:
            e = e + (t1[j] - t2[j] * n) * w
        return e

    return _grid3(n, entry)


# ---------------------------------------------------------------------------
# change of chart


@dataclass
class TransformResult:
    image: tuple
    pi_hat: list
    Dpsi: list
    Hpsi: list
    dlogJ: list
    J: object
    mode: str


def _psi_jets(psi, n, pt, mode):
    if len(psi) != n:
        raise DimensionMismatch("ψ must have n components")
    return [field_jet(f, pt, mode) for f in psi]


def transform(d: NormalProjectiveData, psi, p, mode=None) -> TransformResult:
    """Π̂^α_{βγ} at ψ(p) for the chart change ψ.

    Solves the transition identity
    Π = Dψ⁻¹Hψ + Dψ⁻¹ Π̂(Dψ, Dψ) − (δ ∂logJ + ∂logJ δ)/(n+1)
    for Π̂.  ∂_k log J is taken as tr(Dψ⁻¹ ∂_k Dψ), so no logarithm is
    evaluated.
    """
    n = d.n
    p = tuple(p)
    if mode is None:
        rational = d.mode == EXACT and all(f.is_rational for f in psi) and is_rational_point(p)
        mode = EXACT if rational else FLOAT
    pt = coerce_point(p, mode)
    jets = _psi_jets(psi, n, pt, mode)
    D = [list(j.gradient()) for j in jets]
    H = [[list(r) for r in j.hessian()] for j in jets]
    J = _linalg.det(D)
    if J == 0:
        raise SingularJacobian("Dψ is singular at the point")
    if mode == FLOAT and J < 0:
        raise DomainError("log J undefined: Jacobian determinant is negative")
    try:
        Di = _linalg.inverse(D)
    except _linalg.SingularMatrix:
        raise SingularJacobian("Dψ is singular at the point") from None
    zero = D[0][0] * 0
    dlogJ = [sum((Di[b][a] * H[a][b][k] for a in range(n) for b in range(n)), zero) for k in range(n)]
    Pi = d.upper_values(pt, mode)
    inv = Fraction(1, n + 1) if mode == EXACT else 1.0 / (n + 1)
    M = [[[zero] * n for _ in range(n)] for _ in range(n)]
    for i in range(n):
        for j in range(n):
            for k in range(n):
                v = Pi[i][j][k] - sum((Di[i][m] * H[m][j][k] for m in range(n)), zero)
                if i == j:
                    v += inv * dlogJ[k]
                if i == k:
                    v += inv * dlogJ[j]
                M[i][j][k] = v
    # Π̂^α_{βγ} = Dψ^α_i M^i_{jk} (Dψ⁻¹)^j_β (Dψ⁻¹)^k_γ
    T1 = [[[sum((D[a][i] * M[i][j][k] for i in range(n)), zero) for k in range(n)] for j in range(n)] for a in range(n)]
    T2 = [[[sum((T1[a][j][k] * Di[j][b] for j in range(n)), zero) for k in range(n)] for b in range(n)] for a in range(n)]
    pih = [[[sum((T2[a][b][k] * Di[k][g] for k in range(n)), zero) for g in range(n)] for b in range(n)] for a in range(n)]
    image = tuple(j.value for j in jets)
    return TransformResult(image, pih, D, H, dlogJ, J, mode)


def transition_residual(d: NormalProjectiveData, psi, p, result: Optional[TransformResult] = None):
    """Max residual of the transition identity, recomputing its right-hand
    side from Π̂."""
    r = result or transform(d, psi, p)
    n = d.n
    D, H, L, Ph = r.Dpsi, r.Hpsi, r.dlogJ, r.pi_hat
    Di = _linalg.inverse(D)
    Pi = d.upper_values(coerce_point(tuple(p), r.mode), r.mode)
    inv = Fraction(1, n + 1) if r.mode == EXACT else 1.0 / (n + 1)
    worst = 0
    for i in range(n):
        for j in range(n):
            for k in range(n):
                rhs = 0
                for a in range(n):
                    rhs += Di[i][a] * H[a][j][k]
                    for b in range(n):
                        for g in range(n):
                            rhs += Di[i][a] * Ph[a][b][g] * D[b][j] * D[g][k]
                if i == j:
                    rhs -= inv * L[k]
                if i == k:
                    rhs -= inv * L[j]
                worst = max(worst, abs(Pi[i][j][k] - rhs))
    return worst

"""Cartan projective connection in bundle coordinates, the Ricci-flat
adjustment of the lower block, and Bianchi-type diagnostics."""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import List

from . import _linalg
from .affine import FLOAT_TOL, DimensionTooSmall
from .fields import EXACT, FLOAT, ONE, ZERO, coerce_point, field_jet, is_rational_point
from .projective import CurvatureReport, NormalProjectiveData, _is_zero


@dataclass(frozen=True)
class SectionData:
    """Pulled-back coefficients along a section σ:
    σ*ω^i = Π^i_j dx^j, σ*ω^i_j = Π^i_{jk} dx^k, σ*ω_j = Π_{jk} dx^k."""

    n: int
    Pi_frame: tuple
    Pi_upper: tuple
    Pi_lower: tuple
    mode: str = EXACT

    @classmethod
    def from_normal(cls, d: NormalProjectiveData) -> "SectionData":
        n = d.n
        frame = tuple(tuple(ONE if i == j else ZERO for j in range(n)) for i in range(n))
        return cls(n, frame, d.pi_upper, d.pi_lower, d.mode)

    def values(self, x):
        x = tuple(x)
        mode = self.mode if is_rational_point(x) else FLOAT
        pt = coerce_point(x, mode)
        ev = lambda f: field_jet(f, pt, mode).value  # noqa: E731
        n = self.n
        frame = [[ev(self.Pi_frame[i][j]) for j in range(n)] for i in range(n)]
        up = [[[ev(self.Pi_upper[i][j][k]) for k in range(n)] for j in range(n)] for i in range(n)]
        low = [[ev(self.Pi_lower[j][k]) for k in range(n)] for j in range(n)]
        return frame, up, low


@dataclass(frozen=True)
class BundlePoint:
    x: tuple
    a_upper: tuple
    a_low: tuple


@dataclass(frozen=True)
class BundleTangent:
    dx: tuple
    da_upper: tuple
    da_low: tuple


@dataclass(frozen=True)
class CartanValue:
    w_i: tuple
    w_ij: tuple
    w_low: tuple


def eval_cartan(s: SectionData, p: BundlePoint, t: BundleTangent) -> CartanValue:
    """ω = (ω^i, ω^i_j, ω_j) on the tangent vector ``t`` at ``p``, with the
    product coordinates (x, a^i_j, a_j) induced by the section."""
    n = s.n
    F, P, L = s.values(p.x)
    a, al = p.a_upper, p.a_low
    b = _linalg.inverse([list(r) for r in a])
    dx, dA, dal = t.dx, t.da_upper, t.da_low
    z = F[0][0] * 0
    # pulled-back forms applied to dx
    psi = [sum((F[al_][be] * dx[be] for be in range(n)), z) for al_ in range(n)]
    psi_m = [[sum((P[x][y][g] * dx[g] for g in range(n)), z) for y in range(n)] for x in range(n)]
    psi_l = [sum((L[x][g] * dx[g] for g in range(n)), z) for x in range(n)]
    # a_α b^α_β, used in two blocks
    ab = [sum((al[x] * b[x][y] for x in range(n)), z) for y in range(n)]
    ab_psi = sum((ab[y] * psi[y] for y in range(n)), z)

    w_i = [sum((b[i][x] * psi[x] for x in range(n)), z) for i in range(n)]
    w_ij = [[
        sum((b[i][x] * dA[x][j] for x in range(n)), z)
        + sum((b[i][x] * psi_m[x][y] * a[y][j] for x in range(n) for y in range(n)), z)
        + sum((b[i][x] * psi[x] for x in range(n)), z) * al[j]
        + (ab_psi if i == j else z)
        for j in range(n)] for i in range(n)]
    w_low = [
        dal[j]
        - sum((ab[y] * dA[y][j] for y in range(n)), z)
        - sum((ab[y] * psi_m[y][g] * a[g][j] for y in range(n) for g in range(n)), z)
        + sum((psi_l[x] * a[x][j] for x in range(n)), z)
        - ab_psi * al[j]
        for j in range(n)]
    return CartanValue(tuple(w_i), tuple(tuple(r) for r in w_ij), tuple(w_low))


def ricci_contraction(k_curv) -> list:
    """r_{jk} = K^i_{jik}."""
    n = len(k_curv)
    return [[sum(k_curv[i][j][i][k] for i in range(n)) for k in range(n)] for j in range(n)]


def ricci_adjust(k_prime) -> list:
    """A_{jk} = −(n K'^i_{jik} + K'^i_{kij})/(n²−1).

    Adding A to the lower coefficients (ω_j ↦ ω'_j + A_{jk}ω^k) makes the
    curvature Ricci-flat.  ``k_prime`` is either a CurvatureReport or the
    n⁴ grid K'^i_{jkl}.
    """
    grid = k_prime.k_curv if isinstance(k_prime, CurvatureReport) else k_prime
    n = len(grid)
    if n < 2:
        raise DimensionTooSmall("needs n >= 2")
    r = ricci_contraction(grid)
    exact = all(isinstance(x, (int, Fraction)) for row in r for x in row)
    w = Fraction(-1, n * n - 1) if exact else -1.0 / (n * n - 1)
    return [[w * (n * r[j][k] + r[k][j]) for k in range(n)] for j in range(n)]


def apply_adjustment(lower, A):
    n = len(lower)
    return [[lower[j][k] + A[j][k] for k in range(n)] for j in range(n)]


# ---------------------------------------------------------------------------


@dataclass
class BianchiItem:
    name: str
    hypothesis: bool
    hypothesis_residual: object
    conclusion: bool
    conclusion_residual: object
    applicable: bool

    @property
    def holds(self) -> bool:
        return (not self.hypothesis) or self.conclusion


def _maxabs(it):
    return max((abs(v) for v in it), default=0)


def bianchi_check(r: CurvatureReport, tol: float = FLOAT_TOL) -> List[BianchiItem]:
    """The four implications relating torsion, its derivative and the
    curvature blocks.  Each item reports its hypothesis and conclusion
    separately; ``applicable`` is False for n < 3, where the statements are
    not claimed."""
    n = r.n
    R = range(n)
    K, k, KL, C = r.K_torsion, r.k_curv, r.omega_lower, r.torsion_derivative
    ok = lambda x: _is_zero(x, tol)  # noqa: E731

    # dΩ^i + ω^i_j ∧ Ω^j = 0  <=> the cyclic sum of C vanishes
    dtors = _maxabs(C[i][a][b][c] + C[i][b][c][a] + C[i][c][a][b] for i in R for a in R for b in R for c in R)
    cyc_k = _maxabs(k[i][j][a][b] + k[i][a][b][j] + k[i][b][j][a] for i in R for j in R for a in R for b in R)
    ricci = _maxabs(sum(k[i][j][i][l] for i in R) for j in R for l in R)
    trace = _maxabs(sum(k[i][i][a][b] for i in R) for a in R for b in R)
    tors = _maxabs(K[i][a][b] for i in R for a in R for b in R)
    curv = _maxabs(k[i][j][a][b] for i in R for j in R for a in R for b in R)
    cyc_low = _maxabs(KL[j][a][b] + KL[a][b][j] + KL[b][j][a] for j in R for a in R for b in R)
    low = _maxabs(KL[j][a][b] for j in R for a in R for b in R)
    app = n >= 3
    return [
        BianchiItem("cyclic curvature", ok(dtors), dtors, ok(cyc_k), cyc_k, app),
        BianchiItem("trace curvature", ok(dtors) and ok(ricci), max(dtors, ricci), ok(trace), trace, app),
        BianchiItem("cyclic lower curvature", ok(tors) and ok(trace), max(tors, trace), ok(cyc_low), cyc_low, app),
        BianchiItem("lower curvature", ok(tors) and ok(curv), max(tors, curv), ok(low), low, app),
    ]

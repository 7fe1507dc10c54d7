"""Thomas-Whitehead connections on the chart (x^1..x^n, x^{n+1}) of the
bundle of volume elements.

A TW connection is stored through its blocks: ``alpha[i][j][k]`` = α^i_{jk}
and ``beta[j][k]`` = β_{jk}, so that its connection matrix with respect to
(∂_1, ..., ∂_n, ξ = ∂_{n+1}) is

    ( α^i_{jk}dx^k − δ^i_j dx^{n+1}/(n+1)   −dx^i/(n+1)      )
    ( β_{jk}dx^k                           −dx^{n+1}/(n+1)  )

None of the coefficient fields may depend on x^{n+1}; since fields only
ever reference x^1..x^n this holds by construction.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .affine import (
    DEFAULT_SAMPLES,
    DEFAULT_SEED,
    AffineConnection,
    DimensionMismatch,
    DimensionTooSmall,
    NotEquivalent,
    OneForm,
    _grid3,
    _grid_vanishes,
    _pair_mode,
    _zero,
    delta_pattern,
)
from .fields import (
    EXACT,
    FLOAT,
    ZERO,
    Derived,
    Jet,
    as_field,
    coerce_point,
    field_jet,
    is_rational_point,
    sample_points,
)
from .projective import lower_from_upper_jets, normalize, traces


def _grid2(n, fn):
    return tuple(tuple(fn(j, k) for k in range(n)) for j in range(n))


class VolumeConnection:
    """ω̲ = f_j dx^j + dx^{n+1}."""

    def __init__(self, f):
        self.f = tuple(as_field(x) for x in f)
        self.n = len(self.f)

    @classmethod
    def zero(cls, n):
        return cls([ZERO] * n)

    def shifted(self, rho) -> "VolumeConnection":
        """ω̲ + π*ρ."""
        rho = rho.components if isinstance(rho, OneForm) else rho
        return VolumeConnection([self.f[j] + rho[j] for j in range(self.n)])


class TWConnection:
    def __init__(self, n, alpha, beta):
        if n < 1:
            raise DimensionTooSmall("dimension must be positive")
        self.n = n
        self.alpha = _grid3(n, lambda i, j, k: as_field(alpha[i][j][k]))
        self.beta = _grid2(n, lambda j, k: as_field(beta[j][k]))
        fields = [x for p in self.alpha for r in p for x in r] + [x for r in self.beta for x in r]
        self.mode = EXACT if all(f.is_rational for f in fields) else FLOAT

    @classmethod
    def zero(cls, n):
        return cls(n, _grid3(n, lambda i, j, k: ZERO), _grid2(n, lambda j, k: ZERO))

    def resolve(self, p, mode=None):
        p = tuple(p)
        if len(p) != self.n:
            raise DimensionMismatch(f"point has {len(p)} coordinates, expected {self.n}")
        if mode is None:
            mode = self.mode if is_rational_point(p) else FLOAT
        return coerce_point(p, mode), mode

    def jets_at(self, p, mode=None):
        pt, mode = self.resolve(p, mode)
        A = [[[field_jet(f, pt, mode) for f in r] for r in plane] for plane in self.alpha]
        B = [[field_jet(f, pt, mode) for f in r] for r in self.beta]
        return A, B, mode

    def values(self, p, mode=None):
        A, B, _ = self.jets_at(p, mode)
        return ([[[x.value for x in r] for r in plane] for plane in A], [[x.value for x in r] for r in B])


def _w(n, mode):
    return Fraction(1, n + 1) if mode == EXACT else 1.0 / (n + 1)


# ---------------------------------------------------------------------------


def normal_f(c: AffineConnection):
    """f_j = ½(Γ^α_{αj} + Γ^α_{jα})."""
    t1, t2 = traces(c)
    return VolumeConnection([(t1[j] + t2[j]) / 2 for j in range(c.n)])


def normal_tw(c: AffineConnection):
    """The normal TW connection of ``c`` and the volume connection for which
    its horizontal gauge gives back Γ.  α coincides with Π^i_{jk} and
    β = −(n+1)Π_{jk}."""
    n = c.n
    if n < 2:
        raise DimensionTooSmall("needs n >= 2")
    d = normalize(c)
    rational = c.mode == EXACT
    const = c.is_constant

    def beta(j, k):
        def fn(pt, mode):
            return d._at(pt, mode)[1][j][k] * (-(n + 1))
        return Derived(fn, f"beta_{j + 1}{k + 1}", rational, const)

    return TWConnection(n, d.pi_upper, _grid2(n, beta)), normal_f(c)


def tw_from_connection(c: AffineConnection, v: VolumeConnection, beta_h=None) -> TWConnection:
    """The TW connection whose horizontal gauge with respect to ``v`` is
    (Γ, β^H): α = Γ − (δf + fδ)/(n+1), β = df + ff/(n+1) − fΓ + β^H."""
    n = c.n
    if v.n != n:
        raise DimensionMismatch("volume connection dimension differs")
    f = v.f
    w = Fraction(1, n + 1)
    pat = delta_pattern(n, f)
    alpha = _grid3(n, lambda i, j, k: c.gamma[i][j][k] - pat[i][j][k] * w)
    bh = beta_h if beta_h is not None else _grid2(n, lambda j, k: ZERO)
    rational = c.mode == EXACT and all(x.is_rational for x in f)

    def beta(j, k):
        def fn(pt, mode):
            fj = [field_jet(x, pt, mode) for x in f]
            G = [field_jet(c.gamma[i][j][k], pt, mode) for i in range(n)]
            out = fj[j].partial(k) + fj[k] * fj[j] * _w(n, mode)
            for i in range(n):
                out = out - fj[i] * G[i]
            return out + field_jet(as_field(bh[j][k]), pt, mode)
        return Derived(fn, f"beta_{j + 1}{k + 1}", rational, c.is_constant and all(x.is_constant for x in f))

    return TWConnection(n, alpha, _grid2(n, beta))


def horizontal_gauge(t: TWConnection, v: VolumeConnection):
    """(α^H, β^H) with α^H = α + (δf + fδ)/(n+1) and
    β^H_{jk} = −∂_k f_j + f_k f_j/(n+1) + f_i α^i_{jk} + β_{jk}."""
    n = t.n
    if v.n != n:
        raise DimensionMismatch("volume connection dimension differs")
    f = v.f
    pat = delta_pattern(n, f)
    w = Fraction(1, n + 1)
    alpha_h = _grid3(n, lambda i, j, k: t.alpha[i][j][k] + pat[i][j][k] * w)
    rational = t.mode == EXACT and all(x.is_rational for x in f)

    def beta(j, k):
        def fn(pt, mode):
            fj = [field_jet(x, pt, mode) for x in f]
            out = -fj[j].partial(k) + fj[k] * fj[j] * _w(n, mode)
            for i in range(n):
                out = out + fj[i] * field_jet(t.alpha[i][j][k], pt, mode)
            return out + field_jet(t.beta[j][k], pt, mode)
        return Derived(fn, f"betaH_{j + 1}{k + 1}", rational)

    return alpha_h, _grid2(n, beta)


def induced_connection(t: TWConnection, v: VolumeConnection) -> AffineConnection:
    """The connection ∇^ω̲ on the base, whose Christoffel symbols are α^H."""
    alpha_h, _ = horizontal_gauge(t, v)
    return AffineConnection(t.n, alpha_h)


# ---------------------------------------------------------------------------
# matrix and curvature


def assemble_matrix(t: TWConnection, p, dx, dt):
    """Connection matrix evaluated on the tangent vector (dx, dt)."""
    n = t.n
    (A, B) = t.values(p)
    mode = EXACT if isinstance(A[0][0][0], Fraction) and all(
        isinstance(x, (int, Fraction)) for x in list(dx) + [dt]) else FLOAT
    w = _w(n, mode)
    if mode == FLOAT:
        A = [[[float(x) for x in r] for r in plane] for plane in A]
        B = [[float(x) for x in r] for r in B]
        dx = [float(x) for x in dx]
        dt = float(dt)
    else:
        dx = [Fraction(x) for x in dx]
        dt = Fraction(dt)
    M = [[None] * (n + 1) for _ in range(n + 1)]
    for i in range(n):
        for j in range(n):
            v = sum((A[i][j][k] * dx[k] for k in range(n)), dx[0] * 0)
            if i == j:
                v -= w * dt
            M[i][j] = v
        M[i][n] = -w * dx[i]
    for j in range(n):
        M[n][j] = sum((B[j][k] * dx[k] for k in range(n)), dx[0] * 0)
    M[n][n] = -w * dt
    return M


def block_invariants_hold(t: TWConnection, p) -> bool:
    """∇_ξ = −id/(n+1) and ∇ξ = −id/(n+1), read off the assembled matrix."""
    n = t.n
    w = Fraction(1, n + 1) if t.mode == EXACT and is_rational_point(p) else 1.0 / (n + 1)
    zero = [0] * n
    Mt = assemble_matrix(t, p, zero, 1)
    for a in range(n + 1):
        for b in range(n + 1):
            want = -w if a == b else 0
            if not _zero(Mt[a][b] - want):
                return False
    for k in range(n):
        e = [1 if m == k else 0 for m in range(n)]
        Mk = assemble_matrix(t, p, e, 0)
        for i in range(n + 1):
            want = -w if i == k else 0
            if not _zero(Mk[i][n] - want):
                return False
    return True


@dataclass
class TWCurvature:
    """Coefficients F[a][b][k][l] of R(ω) on ½dx^k∧dx^l (antisymmetric in
    k, l), split into the four blocks of the matrix."""

    n: int
    R_upper: list  # [i][j][k][l]
    R_mixed: list  # [i][k][l], upper-right column
    R_lower: list  # [j][k][l], bottom row
    R_corner: list  # [k][l]
    mode: str

    def matrix(self):
        n = self.n
        out = [[None] * (n + 1) for _ in range(n + 1)]
        for i in range(n):
            for j in range(n):
                out[i][j] = self.R_upper[i][j]
            out[i][n] = self.R_mixed[i]
        for j in range(n):
            out[n][j] = self.R_lower[j]
        out[n][n] = self.R_corner
        return out

    def alpha_wedge_dx(self):
        """α∧dx, recovered from the upper-right block."""
        s = -(self.n + 1)
        return [[[s * x for x in r] for r in plane] for plane in self.R_mixed]

    def beta_wedge_dx(self):
        s = -(self.n + 1)
        return [[s * x for x in r] for r in self.R_corner]


def tw_curvature(t: TWConnection, p, mode=None) -> TWCurvature:
    n = t.n
    A, B, mode = t.jets_at(p, mode)
    av = [[[x.value for x in r] for r in plane] for plane in A]
    bv = [[x.value for x in r] for r in B]
    dA = [[[[A[i][j][k].partial(m).value for m in range(n)] for k in range(n)] for j in range(n)] for i in range(n)]
    dB = [[[B[j][k].partial(m).value for m in range(n)] for k in range(n)] for j in range(n)]
    w = _w(n, mode)
    z = av[0][0][0] * 0
    R = range(n)
    up = [[[[z] * n for _ in R] for _ in R] for _ in R]
    for i in R:
        for j in R:
            for k in R:
                for l in R:
                    v = dA[i][j][l][k] - dA[i][j][k][l]
                    for m in R:
                        v += av[i][m][k] * av[m][j][l] - av[i][m][l] * av[m][j][k]
                    dxb = (bv[j][l] if i == k else z) - (bv[j][k] if i == l else z)
                    up[i][j][k][l] = v - w * dxb
    mixed = [[[-w * (av[i][l][k] - av[i][k][l]) for l in R] for k in R] for i in R]
    lower = [[[z] * n for _ in R] for _ in R]
    for j in R:
        for k in R:
            for l in R:
                v = dB[j][l][k] - dB[j][k][l]
                for m in R:
                    v += bv[m][k] * av[m][j][l] - bv[m][l] * av[m][j][k]
                lower[j][k][l] = v
    corner = [[-w * (bv[l][k] - bv[k][l]) for l in R] for k in R]
    return TWCurvature(n, up, mixed, lower, corner, mode)


@dataclass
class RhoDecomposition:
    rho_i: list  # [i][k][l]
    rho_ij: list  # [i][j][k][l]
    rho_j: list  # [j][k][l]


def rho_decompose(c: TWCurvature) -> RhoDecomposition:
    """ρ^i = −α∧dx/(n+1), ρ^i_j = R^i_j − δ^i_j R^{n+1}_{n+1}, ρ_j = dβ + β∧α."""
    n = c.n
    R = range(n)
    rho_ij = [[[[c.R_upper[i][j][k][l] - (c.R_corner[k][l] if i == j else 0) for l in R] for k in R]
               for j in R] for i in R]
    return RhoDecomposition([[list(r) for r in p] for p in c.R_mixed], rho_ij, [[list(r) for r in p] for p in c.R_lower])


# The projective curvature of the normal Cartan connection and the blocks of
# the normal TW connection differ by fixed scalars:
#   ρ^i = RHO_TORSION · K^i,  ρ^i_j = RHO_CURV · k^i_j,  ρ_j = RHO_LOWER(n) · K_j.
def rho_torsion_factor(n):
    return Fraction(-1, n + 1)


RHO_CURV = 1


def rho_lower_factor(n):
    return -(n + 1)


def tw_ricci(t: TWConnection, p, mode=None):
    """Ric_{jk} = ∂_iα^i_{jk} − ∂_kα^i_{ji} + α^i_{γi}α^γ_{jk} − α^i_{γk}α^γ_{ji}
    − (nβ_{jk} − β_{kj})/(n+1)."""
    n = t.n
    A, B, mode = t.jets_at(p, mode)
    w = _w(n, mode)
    R = range(n)
    out = [[None] * n for _ in R]
    for j in R:
        for k in R:
            v = 0
            for i in R:
                v += A[i][j][k].partial(i).value - A[i][j][i].partial(k).value
                for g in R:
                    v += A[i][g][i].value * A[g][j][k].value - A[i][g][k].value * A[g][j][i].value
            out[j][k] = v - w * (n * B[j][k].value - B[k][j].value)
    return out


# ---------------------------------------------------------------------------
# structural equivalence


class BetaTensor:
    """(0,2)-tensor β on the volume bundle chart, indices 0..n with n for ξ.

    ``bbar`` is ι'_ξβ = β(·, ξ), a 1-form pulled back from the base.
    """

    def __init__(self, n, grid):
        self.n = n
        self.grid = tuple(tuple(as_field(x) for x in row) for row in grid)
        if len(self.grid) != n + 1 or any(len(r) != n + 1 for r in self.grid):
            raise DimensionMismatch(f"β must be {n + 1}x{n + 1}")

    @property
    def bbar(self) -> OneForm:
        return OneForm([self.grid[j][self.n] for j in range(self.n)])

    @classmethod
    def from_parts(cls, n, base, bbar):
        """β_{jk} = base[j][k], β_{j,n+1} = β_{n+1,j} = b̄_j, β(ξ,ξ) = 0."""
        g = [[base[j][k] for k in range(n)] + [bbar[j]] for j in range(n)]
        g.append(list(bbar) + [ZERO])
        return cls(n, g)

    def values(self, p, mode=None):
        p = tuple(p)
        if mode is None:
            mode = EXACT if is_rational_point(p) and all(x.is_rational for r in self.grid for x in r) else FLOAT
        pt = coerce_point(p, mode)
        return [[field_jet(x, pt, mode).value for x in r] for r in self.grid]

    def is_symmetric(self, samples=DEFAULT_SAMPLES, seed=DEFAULT_SEED):
        for p in sample_points(self.n, samples, seed):
            v = self.values(p)
            if any(not _zero(v[a][b] - v[b][a]) for a in range(self.n + 1) for b in range(self.n + 1)):
                return False
        return True

    def vanishes(self, samples=DEFAULT_SAMPLES, seed=DEFAULT_SEED):
        for p in sample_points(self.n, samples, seed):
            if any(not _zero(x) for r in self.values(p) for x in r):
                return False
        return True


def apply_structural_beta(t: TWConnection, beta: BetaTensor) -> TWConnection:
    """∇' = ∇ + (ι'_ξβ)⊗id + id⊗(ι'_ξβ) − β⊗ξ, in block form:
    α'^i_{jk} = α^i_{jk} + δ^i_j b̄_k + δ^i_k b̄_j and β'_{jk} = β_{jk} − β(∂_k, ∂_j).

    The ξ-rows of β must satisfy β(ξ,ξ) = 0 and β(ξ,∂_j) = β(∂_j,ξ) so that
    the result is again a TW connection; both are checked at sample points.
    """
    n = t.n
    if beta.n != n:
        raise DimensionMismatch("β dimension differs")
    g = beta.grid
    cond = [[g[n][n]]] + [[g[n][j] - g[j][n] for j in range(n)]]
    for p in sample_points(n, 5, DEFAULT_SEED):
        pt = coerce_point(p, EXACT if all(x.is_rational for r in cond for x in r) else FLOAT)
        m = EXACT if isinstance(pt[0], Fraction) else FLOAT
        for r in cond:
            for x in r:
                if not _zero(field_jet(x, pt, m).value):
                    raise ValueError("β(ξ,ξ) must vanish and β(ξ,·) must equal β(·,ξ)")
    bbar = [g[j][n] for j in range(n)]
    pat = delta_pattern(n, bbar)
    alpha = _grid3(n, lambda i, j, k: t.alpha[i][j][k] + pat[i][j][k])
    new_beta = _grid2(n, lambda j, k: t.beta[j][k] - g[k][j])
    return TWConnection(n, alpha, new_beta)


def structural_equiv_beta(t1: TWConnection, t2: TWConnection, samples=DEFAULT_SAMPLES, seed=DEFAULT_SEED):
    """The unique β relating ``t1`` and ``t2``, or a falsy NotEquivalent.

    b̄ is read off the diagonal of α' − α and the δ-pattern is checked on all
    entries; the base block is β_{kj} = −(β' − β)_{jk}.
    """
    if t1.n != t2.n:
        raise DimensionMismatch(f"dimensions differ: {t1.n} vs {t2.n}")
    n = t1.n
    da = _grid3(n, lambda i, j, k: t2.alpha[i][j][k] - t1.alpha[i][j][k])
    bbar = [da[j][j][j] / 2 for j in range(n)]
    pat = delta_pattern(n, bbar)
    resid = _grid3(n, lambda i, j, k: da[i][j][k] - pat[i][j][k])
    mode = _pair_mode(t1, t2)
    ok, where, r = _grid_vanishes(resid, n, sample_points(n, samples, seed), mode)
    if not ok:
        return NotStructurallyEquivalent("α' − α is not a δ-pattern", where, r)
    base = _grid2(n, lambda j, k: t1.beta[k][j] - t2.beta[k][j])
    return BetaTensor.from_parts(n, base, bbar)


class NotStructurallyEquivalent(NotEquivalent):
    pass

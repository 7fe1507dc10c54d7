"""Affine connections on a single chart.

Index convention: ``gamma[i][j][k]`` (0-based) is the coefficient
Γ^{i+1}_{j+1,k+1} with Γ^i_{jk} = dx^i(∇_{∂_k} ∂_j).  The lower indices are
in the *reversed* order compared with the common textbook one, so the
torsion component is T^i_{jk} = Γ^i_{kj} − Γ^i_{jk}.  With this sign the
constant example Γ²₁₂ = 3/2, Γ²₂₁ = −1/2 has T²₁₂ = −2, the same as its
Cartan torsion coefficient.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

from .fields import (
    EXACT,
    FLOAT,
    Derived,
    DomainError,
    Expression,
    ParseError,
    ZERO,
    as_field,
    coerce_point,
    field_jet,
    is_rational_point,
    parse_expression,
    resolve_mode,
    sample_points,
    to_source,
)

FLOAT_TOL = 1e-9
DEFAULT_SAMPLES = 20
DEFAULT_SEED = 0


class DimensionMismatch(ValueError):
    pass


class DimensionTooSmall(ValueError):
    pass


class NotEquivalent:
    """Negative verdict of an equivalence test.  Falsy."""

    def __init__(self, reason: str, point=None, residual=None):
        self.reason = reason
        self.point = point
        self.residual = residual

    def __bool__(self):
        return False

    def __repr__(self):
        return f"NotEquivalent({self.reason!r})"


def delta(i, j):
    return 1 if i == j else 0


def _grid3(n, fn):
    return tuple(tuple(tuple(fn(i, j, k) for k in range(n)) for j in range(n)) for i in range(n))


def _check_grid3(n, g):
    if len(g) != n or any(len(r) != n or any(len(c) != n for c in r) for r in g):
        raise DimensionMismatch(f"coefficient grid is not {n}x{n}x{n}")


def _fields_mode(fields, mode):
    if mode is None:
        return EXACT if all(f.is_rational for f in fields) else FLOAT
    if mode == EXACT and not all(f.is_rational for f in fields):
        raise ValueError("exact mode requested for non-rational coefficients")
    return mode


class _Grid:
    """Shared plumbing for objects holding a rank-3 grid of fields."""

    n: int
    mode: str

    def _all_fields(self):
        raise NotImplementedError

    @property
    def is_constant(self) -> bool:
        return all(f.is_constant for f in self._all_fields())

    def point(self, p):
        p = tuple(p)
        if len(p) != self.n:
            raise DimensionMismatch(f"point has {len(p)} coordinates, expected {self.n}")
        mode = self.mode
        if mode == EXACT and not is_rational_point(p):
            mode = FLOAT
        return coerce_point(p, mode), mode


class AffineConnection(_Grid):
    """Christoffel symbols Γ^i_{jk} of a connection on an n-dimensional chart.

    ``gamma[i][j][k]`` holds Γ^{i+1}_{j+1,k+1}; entries are expressions (or
    numbers, which are wrapped).  Γ^i_{jk} = dx^i(∇_{∂_k}∂_j): note the
    reversed lower indices.
    """

    def __init__(self, n: int, gamma, mode: Optional[str] = None):
        if n < 1:
            raise DimensionTooSmall("dimension must be positive")
        _check_grid3(n, gamma)
        self.n = n
        self.gamma = _grid3(n, lambda i, j, k: as_field(gamma[i][j][k]))
        self.mode = _fields_mode(self._all_fields(), mode)

    def _all_fields(self):
        return [f for a in self.gamma for b in a for f in b]

    @classmethod
    def zero(cls, n: int) -> "AffineConnection":
        return cls(n, _grid3(n, lambda i, j, k: ZERO))

    @classmethod
    def constant(cls, values, mode=None) -> "AffineConnection":
        n = len(values)
        return cls(n, values, mode)

    def jets(self, p, mode=None):
        """Nested lists of Jets Γ^i_{jk} at ``p``."""
        pt, m = self.point(p)
        m = mode or m
        return [[[field_jet(f, pt, m) for f in row] for row in plane] for plane in self.gamma]

    def values(self, p, mode=None):
        return [[[j.value for j in row] for row in plane] for plane in self.jets(p, mode)]

    def map(self, fn) -> "AffineConnection":
        return AffineConnection(self.n, _grid3(self.n, lambda i, j, k: fn(i, j, k, self.gamma[i][j][k])))

    def __sub__(self, other: "AffineConnection"):
        _same_n(self, other)
        return _grid3(self.n, lambda i, j, k: self.gamma[i][j][k] - other.gamma[i][j][k])

    # JSON -----------------------------------------------------------------
    def to_dict(self) -> dict:
        if not all(isinstance(f, Expression) for f in self._all_fields()):
            raise TypeError("only expression-valued connections serialize")
        gamma = {}
        for i in range(self.n):
            for j in range(self.n):
                for k in range(self.n):
                    gamma[f"{i + 1},{j + 1},{k + 1}"] = to_source(self.gamma[i][j][k])
        return {"n": self.n, "mode": self.mode, "gamma": gamma}

    @classmethod
    def from_dict(cls, doc: dict) -> "AffineConnection":
        if not isinstance(doc, dict):
            raise ValueError("connection document must be a JSON object")
        for key in ("n", "gamma"):
            if key not in doc:
                raise ValueError(f"connection document lacks {key!r}")
        n = doc["n"]
        if not isinstance(n, int) or isinstance(n, bool) or n < 1:
            raise ValueError("'n' must be a positive integer")
        mode = doc.get("mode")
        if mode not in (None, EXACT, FLOAT):
            raise ValueError(f"unknown mode {mode!r}")
        raw = doc["gamma"]
        if not isinstance(raw, dict):
            raise ValueError("'gamma' must be an object keyed by \"i,j,k\"")
        grid = [[[None] * n for _ in range(n)] for _ in range(n)]
        for key, src in raw.items():
            try:
                i, j, k = (int(s) for s in key.split(","))
            except ValueError:
                raise ValueError(f"bad gamma key {key!r}") from None
            if not all(1 <= x <= n for x in (i, j, k)):
                raise ValueError(f"gamma key {key!r} out of range for n={n}")
            if isinstance(src, (int, float)) and not isinstance(src, bool):
                src = repr(src) if isinstance(src, float) else str(src)
            if not isinstance(src, str):
                raise ValueError(f"gamma[{key}] must be an expression string")
            try:
                grid[i - 1][j - 1][k - 1] = parse_expression(src, n)
            except ParseError as exc:
                raise ValueError(f"gamma[{key}]: {exc}") from None
        missing = [
            f"{i + 1},{j + 1},{k + 1}"
            for i in range(n) for j in range(n) for k in range(n) if grid[i][j][k] is None
        ]
        if missing:
            raise ValueError(f"gamma entries missing: {', '.join(missing)}")
        return cls(n, grid, mode)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)

    @classmethod
    def from_json(cls, text: str) -> "AffineConnection":
        return cls.from_dict(json.loads(text))

    def __repr__(self):
        return f"AffineConnection(n={self.n}, mode={self.mode})"


class TorsionTensor(_Grid):
    """T^i_{jk} = Γ^i_{kj} − Γ^i_{jk}, stored as ``t[i][j][k]``."""

    def __init__(self, n, t, mode=None):
        self.n = n
        self.t = _grid3(n, lambda i, j, k: as_field(t[i][j][k]))
        self.mode = _fields_mode(self._all_fields(), mode)

    def _all_fields(self):
        return [f for a in self.t for b in a for f in b]

    def values(self, p, mode=None):
        pt, m = self.point(p)
        m = mode or m
        return [[[field_jet(f, pt, m).value for f in row] for row in plane] for plane in self.t]

    def check_antisymmetry(self, samples: int = 10, seed: int = DEFAULT_SEED) -> bool:
        for p in sample_points(self.n, samples, seed):
            v = self.values(p)
            n = self.n
            for i in range(n):
                for j in range(n):
                    for k in range(n):
                        if not _zero(v[i][j][k] + v[i][k][j]):
                            return False
        return True


@dataclass(frozen=True)
class OneForm:
    """Components ρ_j (0-based list) of a 1-form on the chart."""

    components: tuple

    def __init__(self, components):
        object.__setattr__(self, "components", tuple(as_field(c) for c in components))

    @property
    def n(self):
        return len(self.components)

    def __getitem__(self, j):
        return self.components[j]

    def __len__(self):
        return len(self.components)

    def values(self, p, mode=None):
        p = tuple(p)
        m = resolve_mode(self.components, p, mode)
        pt = coerce_point(p, m)
        return [field_jet(c, pt, m).value for c in self.components]

    @property
    def is_rational(self):
        return all(c.is_rational for c in self.components)


def _same_n(a, b):
    if a.n != b.n:
        raise DimensionMismatch(f"dimensions differ: {a.n} vs {b.n}")


def _zero(x, tol=FLOAT_TOL):
    if isinstance(x, Fraction):
        return x == 0
    return abs(x) <= tol


# ---------------------------------------------------------------------------


def torsion(c: AffineConnection) -> TorsionTensor:
    g = c.gamma
    return TorsionTensor(c.n, _grid3(c.n, lambda i, j, k: g[i][k][j] - g[i][j][k]), c.mode)


def delta_pattern(n, rho):
    """δ^i_j ρ_k + δ^i_k ρ_j as a grid of fields."""

    def entry(i, j, k):
        e = ZERO
        if i == j:
            e = e + rho[k]
        if i == k:
            e = e + rho[j]
        return e

    return _grid3(n, entry)


def projective_shift(c: AffineConnection, rho) -> AffineConnection:
    """Γ'^i_{jk} = Γ^i_{jk} + δ^i_j ρ_k + δ^i_k ρ_j."""
    rho = rho if isinstance(rho, OneForm) else OneForm(rho)
    if rho.n != c.n:
        raise DimensionMismatch("one-form and connection dimensions differ")
    d = delta_pattern(c.n, rho.components)
    return AffineConnection(c.n, _grid3(c.n, lambda i, j, k: c.gamma[i][j][k] + d[i][j][k]))


def _sample_set(n, samples, seed):
    return sample_points(n, samples, seed)


def _grid_vanishes(grid, n, points, mode):
    """Return (True, None, 0) if every field of the rank-3 grid vanishes at
    all points, else (False, point, residual)."""
    for p in points:
        pt = coerce_point(p, mode)
        worst = 0
        for plane in grid:
            for row in plane:
                for f in row:
                    v = field_jet(f, pt, mode).value
                    if not _zero(v):
                        return False, p, v
                    worst = max(worst, abs(v))
    return True, None, 0


def _pair_mode(*conns):
    return EXACT if all(c.mode == EXACT for c in conns) else FLOAT


def recover_rho(a: AffineConnection, b: AffineConnection, samples: int = DEFAULT_SAMPLES,
                seed: int = DEFAULT_SEED):
    """The one-form ρ with b = a + δρ + ρδ, or a falsy NotEquivalent.

    ρ_j is read off the diagonal entries, ρ_j = (Γ'^j_{jj} − Γ^j_{jj})/2, and
    the reconstruction is then checked on every entry at sample points.
    """
    _same_n(a, b)
    n = a.n
    rho = OneForm([(b.gamma[j][j][j] - a.gamma[j][j][j]) / 2 for j in range(n)])
    rebuilt = projective_shift(a, rho)
    resid = b - rebuilt
    ok, where, r = _grid_vanishes(resid, n, _sample_set(n, samples, seed), _pair_mode(a, b))
    if not ok:
        return NotEquivalent("difference is not of the form δρ + ρδ", where, r)
    return rho


def torsion_free_companion(c: AffineConnection) -> AffineConnection:
    """∇ + ½T: the symmetrized connection (Γ^i_{jk} + Γ^i_{kj})/2."""
    g = c.gamma
    return AffineConnection(c.n, _grid3(c.n, lambda i, j, k: (g[i][j][k] + g[i][k][j]) / 2))


@dataclass
class GeodesicDecomposition:
    """b − a = δφ + φδ + antisym, with antisym^i_{jk} = −antisym^i_{kj}."""

    phi: OneForm
    antisym: TorsionTensor

    def __bool__(self):
        return True


def same_unparameterized_geodesics(a: AffineConnection, b: AffineConnection,
                                   samples: int = DEFAULT_SAMPLES, seed: int = DEFAULT_SEED):
    _same_n(a, b)
    n = a.n
    D = b - a
    anti = _grid3(n, lambda i, j, k: (D[i][j][k] - D[i][k][j]) / 2)
    sym = _grid3(n, lambda i, j, k: (D[i][j][k] + D[i][k][j]) / 2)

    def trace(k):
        e = ZERO
        for al in range(n):
            e = e + sym[al][al][k]
        return e / (n + 1)

    phi = OneForm([trace(k) for k in range(n)])
    pat = delta_pattern(n, phi.components)
    resid = _grid3(n, lambda i, j, k: sym[i][j][k] - pat[i][j][k])
    ok, where, r = _grid_vanishes(resid, n, _sample_set(n, samples, seed), _pair_mode(a, b))
    if not ok:
        return NotEquivalent("symmetric part of the difference is not a δ-pattern", where, r)
    return GeodesicDecomposition(phi, TorsionTensor(n, anti))


# ---------------------------------------------------------------------------
# geodesics


def _accel(c: AffineConnection, x, v):
    g = c.values(x, FLOAT)
    n = c.n
    return [-sum(g[i][j][k] * v[j] * v[k] for j in range(n) for k in range(n)) for i in range(n)]


def geodesic_step(c: AffineConnection, x, v, h: float):
    """One classical RK4 step of x'' + Γ^i_{jk} x'^j x'^k = 0.

    Γ is symmetrized by the quadratic form, so only the torsion-free
    companion matters here.
    """
    if not h > 0 and not h < 0:
        raise ValueError("step must be nonzero")
    x = [float(t) for t in x]
    v = [float(t) for t in v]

    def f(state_x, state_v):
        return state_v, _accel(c, state_x, state_v)

    def axpy(a, s, b):
        return [ai + s * bi for ai, bi in zip(a, b)]

    k1x, k1v = f(x, v)
    k2x, k2v = f(axpy(x, h / 2, k1x), axpy(v, h / 2, k1v))
    k3x, k3v = f(axpy(x, h / 2, k2x), axpy(v, h / 2, k2v))
    k4x, k4v = f(axpy(x, h, k3x), axpy(v, h, k3v))
    nx = [x[i] + h / 6 * (k1x[i] + 2 * k2x[i] + 2 * k3x[i] + k4x[i]) for i in range(len(x))]
    nv = [v[i] + h / 6 * (k1v[i] + 2 * k2v[i] + 2 * k3v[i] + k4v[i]) for i in range(len(v))]
    for t in nx + nv:
        if not math.isfinite(t):
            raise DomainError("geodesic left the domain")
    return tuple(nx), tuple(nv)


def geodesic(c: AffineConnection, x, v, t_end: float = 1.0, steps: int = 200):
    """List of (t, x, v) sampled at every step."""
    h = t_end / steps
    out = [(0.0, tuple(float(t) for t in x), tuple(float(t) for t in v))]
    for s in range(steps):
        x, v = geodesic_step(c, x, v, h)
        out.append(((s + 1) * h, x, v))
    return out


def reparametrized_geodesic(b: AffineConnection, phi, x, v, t_end: float = 1.0, steps: int = 200):
    """Integrate b's geodesic y(u) together with the time change s(u).

    If b = a + δφ + φδ then x_a(s(u)) = y(u) where s solves
    s'' = −2 φ_j(y) y'^j s', s(0) = 0, s'(0) = 1.  Returns a list of
    (s, y) pairs, i.e. points of a's geodesic with their a-parameter.
    """
    phi = phi if isinstance(phi, OneForm) else OneForm(phi)
    n = b.n

    def rhs(state):
        y, w, s, sp = state
        acc = _accel(b, y, w)
        ph = phi.values(y, FLOAT)
        spp = -2 * sum(ph[j] * w[j] for j in range(n)) * sp
        return (w, acc, sp, spp)

    def add(state, k, h):
        return (
            [a + h * d for a, d in zip(state[0], k[0])],
            [a + h * d for a, d in zip(state[1], k[1])],
            state[2] + h * k[2],
            state[3] + h * k[3],
        )

    state = ([float(t) for t in x], [float(t) for t in v], 0.0, 1.0)
    h = t_end / steps
    out = [(0.0, tuple(state[0]))]
    for _ in range(steps):
        k1 = rhs(state)
        k2 = rhs(add(state, k1, h / 2))
        k3 = rhs(add(state, k2, h / 2))
        k4 = rhs(add(state, k3, h))
        state = (
            [state[0][i] + h / 6 * (k1[0][i] + 2 * k2[0][i] + 2 * k3[0][i] + k4[0][i]) for i in range(n)],
            [state[1][i] + h / 6 * (k1[1][i] + 2 * k2[1][i] + 2 * k3[1][i] + k4[1][i]) for i in range(n)],
            state[2] + h / 6 * (k1[2] + 2 * k2[2] + 2 * k3[2] + k4[2]),
            state[3] + h / 6 * (k1[3] + 2 * k2[3] + 2 * k3[3] + k4[3]),
        )
        out.append((state[2], tuple(state[0])))
    return out

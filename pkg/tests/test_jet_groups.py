import random
from fractions import Fraction

import pytest
import sympy
from hypothesis import given, settings, strategies as st

from projtorsion import _linalg
from projtorsion.affine import AffineConnection, projective_shift
from projtorsion.jet_groups import (
    G2Element,
    H2Element,
    PglElement,
    UpperNotIdentity,
    g2_inverse,
    g2_mul,
    h2_embed,
    h2_extract,
    h2_mul,
    h_action,
    h_action_2jet,
    pgl_bracket,
    section_action,
)

F = Fraction


def rf(r):
    return F(r.randint(-6, 6), r.randint(1, 5))


def rand_invertible(r, n):
    while True:
        m = [[rf(r) for _ in range(n)] for _ in range(n)]
        if _linalg.det(m) != 0:
            return m


def rand_g2(r, n):
    return G2Element(rand_invertible(r, n), [[[rf(r) for _ in range(n)] for _ in range(n)] for _ in range(n)])


def rand_h2(r, n):
    return H2Element(rand_invertible(r, n), [rf(r) for _ in range(n)])


def rand_pgl(r, n):
    return PglElement([rf(r) for _ in range(n)], [[rf(r) for _ in range(n)] for _ in range(n)],
                      [rf(r) for _ in range(n)])


seeds = st.integers(0, 2**32 - 1)


@settings(max_examples=30, deadline=None)
@given(seeds, st.sampled_from([2, 3]))
def test_jacobi_identity(seed, n):
    r = random.Random(seed)
    X, Y, Z = (rand_pgl(r, n) for _ in range(3))
    s = pgl_bracket(X, pgl_bracket(Y, Z)) + pgl_bracket(Y, pgl_bracket(Z, X)) + pgl_bracket(Z, pgl_bracket(X, Y))
    assert s.is_zero()


@settings(max_examples=30, deadline=None)
@given(seeds, st.sampled_from([2, 3]))
def test_bracket_antisymmetric(seed, n):
    r = random.Random(seed)
    X, Y = rand_pgl(r, n), rand_pgl(r, n)
    assert (pgl_bracket(X, Y) + pgl_bracket(Y, X)).is_zero()


def _as_matrix(X):
    """[[U, v], [ξ, 0]] in gl(n+1)."""
    n = X.n
    m = [[X.U[i][j] for j in range(n)] + [X.v[i]] for i in range(n)]
    m.append(list(X.xi) + [F(0)])
    return m


def _matrix_bracket(X, Y):
    """Commutator in gl(n+1), reduced modulo scalars so the corner is 0."""
    n = X.n
    a, b = _as_matrix(X), _as_matrix(Y)
    ab, ba = _linalg.matmul(a, b), _linalg.matmul(b, a)
    c = [[ab[i][j] - ba[i][j] for j in range(n + 1)] for i in range(n + 1)]
    s = c[n][n]
    c = [[c[i][j] - (s if i == j else 0) for j in range(n + 1)] for i in range(n + 1)]
    return PglElement([c[i][n] for i in range(n)], [row[:n] for row in c[:n]], c[n][:n])


@settings(max_examples=30, deadline=None)
@given(seeds, st.sampled_from([2, 3]))
def test_bracket_matches_matrix_commutator(seed, n):
    r = random.Random(seed)
    X, Y = rand_pgl(r, n), rand_pgl(r, n)
    assert pgl_bracket(X, Y) == _matrix_bracket(X, Y)


def test_bracket_table_entries():
    n = 2
    e1 = PglElement([1, 0], [[0, 0], [0, 0]], [0, 0])
    f1 = PglElement([0, 0], [[0, 0], [0, 0]], [1, 0])
    br = pgl_bracket(e1, f1)
    # [u, u*] = u u* + (u* u) I
    assert br.U == ((2, 0), (0, 1))
    assert br.v == (0, 0) and br.xi == (0, 0)
    A = PglElement([0, 0], [[1, 2], [3, 4]], [0, 0])
    assert pgl_bracket(A, e1).v == (1, 3)
    assert pgl_bracket(f1, A).xi == (1, 2)


@settings(max_examples=30, deadline=None)
@given(seeds, st.sampled_from([2, 3]))
def test_h2_closure(seed, n):
    r = random.Random(seed)
    a, b = rand_h2(r, n), rand_h2(r, n)
    prod = g2_mul(h2_embed(a), h2_embed(b))
    back = h2_extract(prod)
    assert back is not None
    assert back == h2_mul(a, b)
    assert h2_extract(g2_inverse(h2_embed(a))) is not None


@settings(max_examples=20, deadline=None)
@given(seeds)
def test_g2_group_laws(seed):
    r = random.Random(seed)
    n = 2
    a, b, c = rand_g2(r, n), rand_g2(r, n), rand_g2(r, n)
    assert g2_mul(g2_mul(a, b), c) == g2_mul(a, g2_mul(b, c))
    e = G2Element.identity(n)
    assert g2_mul(a, g2_inverse(a)) == e
    assert g2_mul(g2_inverse(a), a) == e


def test_generic_g2_is_not_h2():
    r = random.Random(0)
    assert h2_extract(rand_g2(r, 2)) is None


def test_h_action_2jet_matches_embedding():
    r = random.Random(11)
    n = 2
    xs = sympy.symbols("y1:3")
    for _ in range(20):
        h = rand_h2(r, n)
        A, quad = h_action_2jet(h)
        emb = h2_embed(h)
        # twice the quadratic Taylor part is the H² coordinate
        assert all(2 * quad[i][j][k] == emb.a_sym[i][j][k] for i in range(n) for j in range(n) for k in range(n))
        # symbolic Taylor expansion of x ↦ Ax/(a·x + 1) at 0
        S = lambda q: sympy.Rational(q.numerator, q.denominator)  # noqa: E731
        den = sum(S(h.a_low[j]) * xs[j] for j in range(n)) + 1
        for i in range(n):
            comp = sum(S(h.a_upper[i][j]) * xs[j] for j in range(n)) / den
            at0 = {x: 0 for x in xs}
            for j in range(n):
                assert sympy.diff(comp, xs[j]).subs(at0) == S(A[i][j])
                for k in range(n):
                    assert sympy.diff(comp, xs[j], xs[k]).subs(at0) == 2 * S(quad[i][j][k])


def test_h_action_numeric():
    h = H2Element([[2, 0], [0, 1]], [1, 0])
    assert h_action(h, (F(1), F(1))) == (F(1), F(1, 2))


def test_section_action_is_projective_shift():
    r = random.Random(4)
    n = 3
    g = [[[rf(r) for _ in range(n)] for _ in range(n)] for _ in range(n)]
    a = [rf(r) for _ in range(n)]
    got = section_action(g, H2Element(_linalg.identity(n), a))
    want = projective_shift(AffineConnection(n, g), a).values((0,) * n)
    assert [[list(row) for row in plane] for plane in got] == want


def test_section_action_requires_identity_block():
    with pytest.raises(UpperNotIdentity):
        section_action([[[0, 0], [0, 0]], [[0, 0], [0, 0]]], H2Element([[2, 0], [0, 1]], [0, 0]))

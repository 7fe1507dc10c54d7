import json
import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from conftest import sample_connection, random_constant_connection, random_poly_connection
from projtorsion.affine import (
    AffineConnection,
    DimensionMismatch,
    NotEquivalent,
    OneForm,
    geodesic,
    projective_shift,
    recover_rho,
    reparametrized_geodesic,
    same_unparameterized_geodesics,
    torsion,
    torsion_free_companion,
)
from projtorsion.fields import parse_expression

F = Fraction


def test_torsion_sign_convention():
    t = torsion(sample_connection()).values((0, 0))
    assert t[1][0][1] == -2
    assert t[1][1][0] == 2
    assert t[0] == [[0, 0], [0, 0]]


def test_torsion_antisymmetric_on_polynomial_input(rng):
    c = random_poly_connection(rng)
    assert torsion(c).check_antisymmetry()


def test_json_roundtrip(rng):
    c = random_poly_connection(rng)
    back = AffineConnection.from_json(c.to_json())
    for p in [(F(1, 3), F(2, 7)), (F(-1), F(5, 2))]:
        assert back.values(p) == c.values(p)


def test_from_dict_reports_missing_entries():
    doc = {"n": 2, "gamma": {"1,1,1": "x1"}}
    with pytest.raises(ValueError, match="missing"):
        AffineConnection.from_dict(doc)
    with pytest.raises(ValueError, match="out of range"):
        AffineConnection.from_dict({"n": 1, "gamma": {"1,1,2": "0"}})


def test_float_connection_mode():
    c = AffineConnection.from_dict({"n": 1, "gamma": {"1,1,1": "sin(x1)"}})
    assert c.mode == "float"
    assert c.values((0.0,)) == [[[0.0]]]


def test_shift_then_recover(rng):
    c = random_poly_connection(rng)
    rho = [parse_expression("x1*x2 - 1/2", 2), parse_expression("(3/5)*x1^2", 2)]
    d = projective_shift(c, rho)
    got = recover_rho(c, d)
    assert got
    for p in [(F(1, 3), F(1, 4)), (F(2), F(-3))]:
        assert got.values(p) == OneForm(rho).values(p)


def test_recover_rho_rejects_non_pattern():
    a = AffineConnection.zero(2)
    g = [[[F(0)] * 2 for _ in range(2)] for _ in range(2)]
    g[0][1][1] = F(1)
    r = recover_rho(a, AffineConnection(2, g))
    assert isinstance(r, NotEquivalent)
    assert not r


def test_dimension_mismatch():
    with pytest.raises(DimensionMismatch):
        recover_rho(AffineConnection.zero(2), AffineConnection.zero(3))
    with pytest.raises(DimensionMismatch):
        projective_shift(AffineConnection.zero(2), [1, 2, 3])


def test_companion_is_symmetric_and_keeps_geodesics():
    c = sample_connection()
    s = torsion_free_companion(c)
    assert torsion(s).values((0, 0)) == [[[0, 0], [0, 0]], [[0, 0], [0, 0]]]
    dec = same_unparameterized_geodesics(c, s)
    assert dec
    assert dec.phi.values((0, 0)) == [0, 0]


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 10**6))
def test_shift_leaves_torsion_unchanged(seed):
    r = random.Random(seed)
    n = r.choice([2, 3])
    c = random_constant_connection(r, n)
    rho = [F(r.randint(-4, 4), r.randint(1, 3)) for _ in range(n)]
    d = projective_shift(c, rho)
    assert torsion(c).values([0] * n) == torsion(d).values([0] * n)
    dec = same_unparameterized_geodesics(c, d)
    assert dec.phi.values([0] * n) == rho


def test_same_geodesics_rejects_other_symmetric_change():
    a = AffineConnection.zero(2)
    g = [[[F(0)] * 2 for _ in range(2)] for _ in range(2)]
    g[1][0][0] = F(1)
    assert not same_unparameterized_geodesics(a, AffineConnection(2, g))


def _trace_distance(a, b, rho, x, v, checkpoints=(50, 100, 150, 200)):
    """Compare b's reparametrized geodesic with a's geodesic at its own parameter."""
    traj = reparametrized_geodesic(b, rho, x, v, t_end=1.0, steps=200)
    worst = 0.0
    for idx in checkpoints:
        s, y = traj[idx]
        xa = geodesic(a, x, v, t_end=s, steps=400)[-1][1]
        worst = max(worst, max(abs(p - q) for p, q in zip(xa, y)))
    return worst


def test_reparametrized_geodesic_matches():
    r = random.Random(3)
    for _ in range(3):
        a = AffineConnection(2, [[[F(r.randint(-2, 2), 4) for _ in range(2)] for _ in range(2)] for _ in range(2)])
        rho = [F(r.randint(-2, 2), 5) for _ in range(2)]
        b = projective_shift(a, rho)
        assert _trace_distance(a, b, rho, (0.1, -0.2), (0.5, 0.3)) < 1e-6


def test_wrong_time_change_is_detected():
    a = AffineConnection(2, [[[F(1, 4), F(0)], [F(-1, 2), F(1, 4)]], [[F(0), F(1, 2)], [F(1, 4), F(-1, 4)]]])
    rho = [F(2, 5), F(-1, 5)]
    b = projective_shift(a, rho)
    assert _trace_distance(a, b, [-x for x in rho], (0.1, -0.2), (0.5, 0.3)) > 1e-4


def test_json_document_is_plain():
    doc = json.loads(sample_connection().to_json())
    assert doc["gamma"]["2,1,2"] == "(3/2)"

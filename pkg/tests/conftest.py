import random
from fractions import Fraction
from pathlib import Path

import pytest

from projtorsion.affine import AffineConnection
from projtorsion.fields import parse_expression

DATA = Path(__file__).parent / "data"

# Reference Christoffel table (constant, with torsion), Γ^i_{jk} keyed (i, j, k), 1-based.
SAMPLE_GAMMA = {
    (1, 1, 1): Fraction(1), (1, 1, 2): Fraction(-1, 2), (1, 2, 1): Fraction(-1, 2), (1, 2, 2): Fraction(0),
    (2, 1, 1): Fraction(1), (2, 1, 2): Fraction(3, 2), (2, 2, 1): Fraction(-1, 2), (2, 2, 2): Fraction(-1),
}


def sample_connection():
    return AffineConnection(2, [[[SAMPLE_GAMMA[(i + 1, j + 1, k + 1)] for k in range(2)] for j in range(2)]
                                for i in range(2)])


def rand_frac(rng, num=5, den=4):
    return Fraction(rng.randint(-num, num), rng.randint(1, den))


def random_constant_grid(rng, n, symmetric=False):
    g = [[[rand_frac(rng) for _ in range(n)] for _ in range(n)] for _ in range(n)]
    if symmetric:
        for i in range(n):
            for j in range(n):
                for k in range(j):
                    g[i][j][k] = g[i][k][j]
    return g


def random_constant_connection(rng, n, symmetric=False):
    return AffineConnection(n, random_constant_grid(rng, n, symmetric))


def random_poly_source(rng, n, degree=2):
    monos = [()]
    for _ in range(degree):
        monos = monos + [m + (v,) for m in monos for v in range(1, n + 1) if not m or v >= m[-1]]
    monos = sorted(set(monos))
    terms = []
    for m in monos:
        c = rand_frac(rng, 3, 3)
        if c == 0:
            continue
        factors = [f"({c})"] + [f"x{v}" for v in m]
        terms.append("*".join(factors))
    return " + ".join(terms) if terms else "0"


def random_poly_sources(rng, n=2, degree=2):
    return [[[random_poly_source(rng, n, degree) for _ in range(n)] for _ in range(n)] for _ in range(n)]


def connection_from_sources(n, sources):
    return AffineConnection(n, [[[parse_expression(s, n) for s in row] for row in plane] for plane in sources])


def random_poly_connection(rng, n=2, degree=2):
    return connection_from_sources(n, random_poly_sources(rng, n, degree))


@pytest.fixture
def rng():
    return random.Random(12345)

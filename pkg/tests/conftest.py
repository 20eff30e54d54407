"""Shared fixture graphs and independent oracles for the test suite.

Oracles here are deliberately naive re-implementations (cofactor
determinants, dictionary series expansion) so that every derived expected
value is computed by a second route before being asserted.
"""

import itertools
from fractions import Fraction

import pytest

from plumbsw import fixtures as fx
from plumbsw.graph import PlumbingGraph, validate


@pytest.fixture(scope="session")
def single3():
    return validate(["x"], [-3], [])


@pytest.fixture(scope="session")
def a2():
    return fx.string_graph([-2, -2])


@pytest.fixture(scope="session")
def e8():
    return fx.ade_graph("E8")


@pytest.fixture(scope="session")
def showcase1():
    return fx.showcase_two_nodes()


@pytest.fixture(scope="session")
def showcase2():
    return fx.showcase_star()


@pytest.fixture(scope="session")
def gor_star():
    return fx.gorenstein_star()


# -- oracles --------------------------------------------------------------------


def det_cofactor(m):
    """Determinant by cofactor expansion; independent of the library path."""
    n = len(m)
    if n == 1:
        return m[0][0]
    total = 0
    for j in range(n):
        if m[0][j] == 0:
            continue
        minor = [[m[i][k] for k in range(n) if k != j] for i in range(1, n)]
        total += (-1) ** j * m[0][j] * det_cofactor(minor)
    return total


def brute_series(g: PlumbingGraph, depth: int):
    """Series coefficients by explicit product expansion.

    Returns {dual-coordinate tuple: coefficient} with free exponents up to
    depth; complete for every exponent whose free coordinates stay within
    the window.
    """
    factors = []
    for v in range(g.n):
        dv = g.delta[v]
        if dv == 0:
            factors.append([(k, k + 1) for k in range(depth + 1)])
        elif dv == 1:
            factors.append([(k, 1) for k in range(depth + 1)])
        elif dv == 2:
            factors.append([(0, 1)])
        else:
            from math import comb
            factors.append([(b, (-1) ** b * comb(dv - 2, b)) for b in range(dv - 1)])
    out = {}
    for combo in itertools.product(*factors):
        a = tuple(c[0] for c in combo)
        z = 1
        for c in combo:
            z *= c[1]
        out[a] = out.get(a, 0) + z
    return out


def brute_counting(g: PlumbingGraph, x, subset, strict_all=False):
    """Counting function from the dictionary oracle.

    Sums coefficients over the class of x with the coordinate condition on
    the subset; the expansion window is sized from the thresholds so the
    sum is provably complete.
    """
    xs = x.scaled()
    d = g.det
    cols = g.dual_scaled
    depth = 0
    for v in range(g.n):
        if g.delta[v] <= 1:
            bound = max(-(-xs[w] // cols[v][w]) for w in subset)
            depth = max(depth, bound + 1)
    table = brute_series(g, depth)
    key = g.class_key(x)
    total = 0
    for a, z in table.items():
        if z == 0:
            continue
        coords = tuple(sum(a[v] * cols[v][w] for v in range(g.n)) for w in range(g.n))
        if tuple(c % d for c in coords) != key:
            continue
        if strict_all:
            if all(coords[w] < xs[w] for w in subset):
                total += z
        else:
            if any(coords[w] < xs[w] for w in subset):
                total += z
    return total

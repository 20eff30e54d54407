"""Weighted-cube formulas: an independent route to the same invariants.

For numerically Gorenstein trees the coefficients, the normalized
invariant and the reduced periodic constants all have closed expressions
as alternating sums of chi-weighted lattice cubes inside the rectangle
spanned by 0 and the anticanonical cycle.  Nothing here touches the
series enumeration, which is exactly what makes these sums useful as an
oracle against it.

Cube bookkeeping is done on an n-dimensional integer grid of chi values,
so a whole rectangle sum is a handful of shifted-slice maxima.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import (
    InternalDisagreement,
    NotGorenstein,
    SubsetCapExceeded,
)
from .graph import LatticeVector, PlumbingGraph
from . import series
from .sw import sw_invariant

SUBSET_SWEEP_CAP = 12


@dataclass(frozen=True)
class Cube:
    """Lattice cube: base point plus a subset of unit directions."""

    base: LatticeVector
    directions: tuple

    def vertices(self):
        g = self.base.graph
        for sub in itertools.chain.from_iterable(
            itertools.combinations(self.directions, r)
            for r in range(len(self.directions) + 1)
        ):
            step = g.zero()
            for v in sub:
                step = step + g.basis_vector(v)
            yield self.base + step


@dataclass(frozen=True)
class Rectangle:
    lo: LatticeVector
    hi: LatticeVector

    def contains_cube(self, cube: Cube) -> bool:
        return all(self.lo <= p and p <= self.hi for p in cube.vertices())


def weight(g: PlumbingGraph, l: LatticeVector, directions) -> int:
    """max of chi over the vertices of the cube (l, directions)."""
    assert l.is_integral()
    best = None
    for p in Cube(l, tuple(directions)).vertices():
        c = g.chi(p)
        assert c.denominator == 1
        if best is None or c > best:
            best = c
    return int(best)


def _corner_matrix(g):
    key = "corner_matrix"
    if key not in g._cache:
        n = g.n
        corners = np.zeros((1 << n, n), dtype=np.int64)
        for sub in range(1 << n):
            for v in range(n):
                if sub >> v & 1:
                    corners[sub, v] = 1
        g._cache[key] = corners
    return g._cache[key]


def coefficient_via_cubes(g: PlumbingGraph, l: LatticeVector) -> int:
    """Series coefficient of an integral exponent as an alternating cube sum.

    w(l, J) for all J at once: chi on the 2^n corners of the unit cube at
    l, then a subset-max transform.
    """
    assert l.is_integral()
    n = g.n
    pts = np.array([int(c) for c in l.coords], dtype=np.int64)[None, :] + _corner_matrix(g)
    imat = np.array(g.matrix, dtype=np.int64)
    kp = np.array(g.kpair, dtype=np.int64)
    two_chi = -(np.einsum("ij,jk,ik->i", pts, imat, pts) + pts @ kp)
    assert not (two_chi & 1).any()
    w = two_chi // 2
    for v in range(n):
        bit = 1 << v
        idx = np.arange(1 << n)
        hasbit = (idx & bit) != 0
        w[hasbit] = np.maximum(w[hasbit], w[idx[hasbit] ^ bit])
    signs = np.array([1 if bin(j).count("1") % 2 else -1 for j in range(1 << n)],
                     dtype=np.int64)
    return int((signs * w).sum())


def swbar(g: PlumbingGraph) -> Fraction:
    """-sw(trivial class) - (K^2 + |V|)/8, measured by counting."""
    rec = sw_invariant(g, tuple([0] * g.n))
    return -rec.sw - Fraction(g.K.pair(g.K) + g.n, 8)


def swbar_forest(forest) -> Fraction:
    return sum((swbar(comp) for comp, _ in forest), Fraction(0))


# -- grid machinery -------------------------------------------------------------


def _chi_box(g: PlumbingGraph, hi):
    """chi over the integer box [0, hi] as an n-dimensional int64 grid."""
    key = ("chibox", tuple(hi))
    if key in g._cache:
        return g._cache[key]
    axes = [np.arange(h + 1, dtype=np.int64) for h in hi]
    mesh = np.meshgrid(*axes, indexing="ij")
    pts = np.stack([m.reshape(-1) for m in mesh], axis=1)
    imat = np.array(g.matrix, dtype=np.int64)
    kp = np.array(g.kpair, dtype=np.int64)
    two_chi = -(np.einsum("ij,jk,ik->i", pts, imat, pts) + pts @ kp)
    assert not (two_chi & 1).any(), "chi not integral on integral points"
    grid = (two_chi // 2).reshape([h + 1 for h in hi])
    g._cache[key] = grid
    return grid


def _cube_sum(g: PlumbingGraph, lo, hi, skip_faces=()):
    """Alternating weighted-cube sum over the rectangle R(lo, hi).

    skip_faces: drop every cube sitting inside the top face l_v = hi_v of
    one of the listed coordinates (the modified-counting variant).
    """
    n = g.n
    lo = list(map(int, lo))
    hi = list(map(int, hi))
    if any(l > h for l, h in zip(lo, hi)):
        return 0
    grid = _chi_box(g, hi)
    total = 0
    for jmask in range(1 << n):
        J = [v for v in range(n) if jmask >> v & 1]
        sizes = [hi[v] - lo[v] + 1 - (1 if v in J else 0) for v in range(n)]
        if any(s <= 0 for s in sizes):
            continue
        # bases l with lo <= l and l + E_J <= hi; weight = max chi over subcube
        base_slices = [slice(lo[v], lo[v] + sizes[v]) for v in range(n)]
        wgrid = None
        for sub in range(1 << len(J)):
            shift = [0] * n
            for i, v in enumerate(J):
                if sub >> i & 1:
                    shift[v] = 1
            sl = tuple(
                slice(base_slices[v].start + shift[v], base_slices[v].stop + shift[v])
                for v in range(n)
            )
            piece = grid[sl]
            wgrid = piece if wgrid is None else np.maximum(wgrid, piece)
        if skip_faces:
            keep = np.ones_like(wgrid, dtype=bool)
            for v in skip_faces:
                if v in J:
                    continue
                # exclude bases sitting in the top face l_v = hi_v
                idx = [slice(None)] * n
                idx[v] = sizes[v] - 1
                keep[tuple(idx)] = False
            s = int(wgrid[keep].sum())
        else:
            s = int(wgrid.sum())
        total += (1 if len(J) % 2 else -1) * s
    return total


def swbar_via_cubes(g: PlumbingGraph, b: LatticeVector) -> Fraction:
    """Cube-sum expression of the normalized trivial-class invariant.

    Requires an integral anticanonical cycle and any integral b above it;
    the value does not depend on the choice of b.
    """
    if not g.numerically_gorenstein:
        raise NotGorenstein("anticanonical cycle is not integral")
    if not (b.is_integral() and b >= g.ZK):
        raise NotGorenstein("bound must be an integral cycle above the anticanonical one")
    return Fraction(_cube_sum(g, [0] * g.n, [int(c) for c in b.coords]))


def _swbar_cube_faces(g: PlumbingGraph):
    """Cube-sum value of every induced subgraph, as rectangle-face sums.

    Entry for a subset S of vertices is the invariant sum of the subgraph
    on S, computed inside the big rectangle: bases run over the face where
    the deleted coordinates are pinned to the anticanonical value.
    """
    key = "swbar_cube_faces"
    if key not in g._cache:
        zk = [int(c) for c in g.ZK.coords]
        vals = {}
        for mask in range(1 << g.n):
            lo = [0 if mask >> v & 1 else zk[v] for v in range(g.n)]
            vals[mask] = Fraction(_cube_sum(g, lo, zk))
        g._cache[key] = vals
    return g._cache[key]


def gorenstein_pc(g: PlumbingGraph, subset) -> Fraction:
    """Reduced periodic constant of the trivial class, three independent ways.

    (a) the counting function of the series at the anticanonical cycle,
    (b) inclusion-exclusion over modified cube sums,
    (c) the difference of whole-graph and deleted-graph cube invariants,
        re-derived through the subgraph Moebius transform.
    All three must agree exactly.
    """
    if not g.numerically_gorenstein:
        raise NotGorenstein("anticanonical cycle is not integral")
    subset = tuple(sorted(set(subset)))
    assert subset, "subset must be nonempty"
    zk = [int(c) for c in g.ZK.coords]

    via_series = series.counting_reduced(g, g.ZK, subset)

    via_cubes = 0
    for r in range(1, len(subset) + 1):
        for J in itertools.combinations(subset, r):
            via_cubes += (-1) ** (r + 1) * _cube_sum(g, [0] * g.n, zk, skip_faces=J)

    faces = _swbar_cube_faces(g)
    full_mask = (1 << g.n) - 1
    rest_mask = 0
    for v in range(g.n):
        if v not in subset:
            rest_mask |= 1 << v
    via_chain = faces[full_mask] - faces[rest_mask]

    # Moebius route: s(S) = sum_{T subset S} (-1)^{|S - T|} swbar(T); the chain
    # value must reappear as the sum of s over subsets meeting the deleted set
    if g.n <= SUBSET_SWEEP_CAP:
        mob = _mobius(faces, g.n)
        via_mobius = sum(
            mob[m] for m in range(1 << g.n) if m & ~rest_mask & full_mask
        )
        if via_mobius != via_chain:
            raise InternalDisagreement(
                "moebius chain %s vs face difference %s" % (via_mobius, via_chain)
            )

    if not (Fraction(via_series) == Fraction(via_cubes) == via_chain):
        raise InternalDisagreement(
            "series %s, cubes %s, chain %s disagree on subset %s"
            % (via_series, via_cubes, via_chain, subset)
        )
    return Fraction(via_series)


def _mobius(vals, n):
    """Subset Moebius transform: out[S] = sum_{T <= S} (-1)^{|S-T|} vals[T]."""
    out = dict(vals)
    for v in range(n):
        bit = 1 << v
        for m in range(1 << n):
            if m & bit:
                out[m] = out[m] - out[m ^ bit]
    return out


def s_function(g: PlumbingGraph, cap: int = SUBSET_SWEEP_CAP) -> Fraction:
    """The unique function on induced subgraphs whose subset sums give swbar.

    Computed by the defining recursion over all induced subgraphs (with
    counting-measured invariants), then cross-checked against the Moebius
    expansion; vanishing on disconnected subgraphs and the re-summation to
    the whole-graph value are asserted along the way.
    """
    if g.n > cap:
        raise SubsetCapExceeded("%d vertices exceed the %d-vertex sweep cap" % (g.n, cap))
    n = g.n
    sw_sub = {}
    for mask in range(1 << n):
        deleted = [v for v in range(n) if not (mask >> v & 1)]
        if mask == 0:
            sw_sub[mask] = Fraction(0)
        else:
            sw_sub[mask] = swbar_forest(g.components_minus(deleted))
    mob = _mobius(sw_sub, n)
    # defining recursion, independently of the transform
    s_rec = {}
    for mask in range(1 << n):
        sub = (mask - 1) & mask
        acc = Fraction(0)
        while sub:
            acc += s_rec[sub]
            sub = (sub - 1) & mask
        s_rec[mask] = sw_sub[mask] - acc
    for mask in range(1 << n):
        if s_rec[mask] != mob[mask]:
            raise InternalDisagreement("Moebius and recursive values differ at %d" % mask)
    # vanishing on disconnected induced subgraphs
    for mask in range(1 << n):
        deleted = [v for v in range(n) if not (mask >> v & 1)]
        if mask and len(g.components_minus(deleted)) >= 2:
            if s_rec[mask] != 0:
                raise InternalDisagreement("nonzero value on a disconnected subgraph")
    full = (1 << n) - 1
    assert sum(s_rec.values(), Fraction(0)) == sw_sub[full]
    return s_rec[full]


def subgraph_s_values(g: PlumbingGraph, cap: int = SUBSET_SWEEP_CAP):
    """Moebius values of every induced subgraph (counting-measured)."""
    if g.n > cap:
        raise SubsetCapExceeded("%d vertices exceed the %d-vertex sweep cap" % (g.n, cap))
    sw_sub = {}
    for mask in range(1 << g.n):
        deleted = [v for v in range(g.n) if not (mask >> v & 1)]
        sw_sub[mask] = swbar_forest(g.components_minus(deleted)) if mask else Fraction(0)
    return _mobius(sw_sub, g.n)

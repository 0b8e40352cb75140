"""Combining three clusterings with the coordinate pivot, and the pair-distance
bookkeeping behind its analysis."""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .graph import UNIT, Clustering, Graph, WeightFn


class CoordinateIndex:
    """Per-vertex triple of cluster ids, one id per input clustering."""

    def __init__(self, cx: Clustering, cy: Clustering, cz: Clustering):
        if not (cx.n == cy.n == cz.n):
            raise ValueError("the three clusterings must cover the same vertex set")
        self.coords = np.stack([cx.labels, cy.labels, cz.labels], axis=1)

    @property
    def n(self) -> int:
        return self.coords.shape[0]

    def distance(self, u, v):
        return (self.coords[u] != self.coords[v]).sum(axis=-1)

    def groups(self) -> dict:
        out = {}
        for v, t in enumerate(map(tuple, self.coords.tolist())):
            out.setdefault(t, []).append(v)
        return out


def pivot3(cx: Clustering, cy: Clustering, cz: Clustering, check_monotone: bool = True) -> Clustering:
    """Repeatedly take the triple with the most unassigned vertices (smallest
    triple on ties) and cluster every unassigned vertex within Hamming distance 1."""
    idx = CoordinateIndex(cx, cy, cz)
    coords = idx.coords
    lab = np.full(idx.n, -1, dtype=np.int64)
    cid = 0
    while True:
        free = np.flatnonzero(lab < 0)
        if free.size == 0:
            break
        # np.unique sorts rows lexicographically, argmax keeps the first maximum
        triples, counts = np.unique(coords[free], axis=0, return_counts=True)
        k = int(np.argmax(counts))
        if check_monotone:
            assert counts[k] >= counts.max()
        pivot = triples[k]
        near = free[(coords[free] != pivot).sum(axis=1) <= 1]
        lab[near] = cid
        cid += 1
    return Clustering(lab)


@dataclass
class PairDistanceTable:
    plus: np.ndarray  # plus[i] = |E+_i| (or weight)
    minus: np.ndarray

    @property
    def special(self):
        return self.minus[0] + self.minus[1] + self.minus[2] + self.plus[2] + self.plus[3]

    @property
    def normal(self):
        return self.plus[0] + self.plus[1] + self.minus[3]


def _pairs(n):
    iu, ju = np.triu_indices(n, 1)
    return iu, ju


def classify_pairs(g: Graph, cx: Clustering, cy: Clustering, cz: Clustering,
                   w: WeightFn | None = None) -> PairDistanceTable:
    """Counts of E+_i and E-_i by Hamming distance i (weights when ``w`` is given)."""
    idx = CoordinateIndex(cx, cy, cz)
    iu, ju = _pairs(idx.n)
    dist = idx.distance(iu, ju)
    adj = g.has_edges(iu, ju)
    if w is None:
        val = np.ones(iu.size, dtype=np.int64)
        scale = 1
    else:
        scale = w.scale
        val = w.pair_units(g, iu, ju, scale)
    plus = np.array([int(val[adj & (dist == i)].sum()) for i in range(4)], dtype=object)
    minus = np.array([int(val[~adj & (dist == i)].sum()) for i in range(4)], dtype=object)
    if scale != 1:
        plus = np.array([Fraction(x, scale) for x in plus], dtype=object)
        minus = np.array([Fraction(x, scale) for x in minus], dtype=object)
    return PairDistanceTable(plus, minus)


@dataclass
class PivotLemmaReport:
    plus0_never_cut: bool
    minus3_never_joined: bool
    special_covers_half: bool
    special: int
    paid: int
    table: PairDistanceTable

    @property
    def ok(self) -> bool:
        return self.plus0_never_cut and self.minus3_never_joined and self.special_covers_half


def verify_pivot_lemma(g: Graph, cx: Clustering, cy: Clustering, cz: Clustering) -> PivotLemmaReport:
    res = pivot3(cx, cy, cz)
    idx = CoordinateIndex(cx, cy, cz)
    iu, ju = _pairs(idx.n)
    dist = idx.distance(iu, ju)
    adj = g.has_edges(iu, ju)
    together = res.labels[iu] == res.labels[ju]
    a = not np.any(adj & (dist == 0) & ~together)
    b = not np.any(~adj & (dist == 3) & together)
    paid = int(np.count_nonzero((adj & ~together) | (~adj & together)))
    table = classify_pairs(g, cx, cy, cz)
    special = int(table.special)
    return PivotLemmaReport(a, b, 2 * special >= paid, special, paid, table)


@dataclass
class SpecialBoundReport:
    minus_lhs: Fraction
    minus_rhs: Fraction
    plus_lhs: Fraction
    plus_rhs: Fraction

    @property
    def ok(self) -> bool:
        return self.minus_lhs <= self.minus_rhs and self.plus_lhs <= self.plus_rhs


def verify_special_bound(g: Graph, cx: Clustering, cy: Clustering, cz: Clustering,
                         w: WeightFn = UNIT) -> SpecialBoundReport:
    """w(E-_0 + E-_1 + E-_2) against the summed minus costs, and w(E+_2 + E+_3)
    against the pairwise doubly-cut weights."""
    idx = CoordinateIndex(cx, cy, cz)
    iu, ju = _pairs(idx.n)
    dist = idx.distance(iu, ju)
    adj = g.has_edges(iu, ju)
    scale = w.scale
    val = w.pair_units(g, iu, ju, scale)
    cs = (cx, cy, cz)
    cut = [c.labels[iu] != c.labels[ju] for c in cs]
    minus_lhs = int(val[~adj & (dist <= 2)].sum())
    minus_rhs = sum(int(val[~adj & ~cut[i]].sum()) for i in range(3))
    plus_lhs = int(val[adj & (dist >= 2)].sum())
    plus_rhs = sum(int(val[adj & cut[i] & cut[j]].sum()) for i in range(3) for j in range(i + 1, 3))
    return SpecialBoundReport(Fraction(minus_lhs, scale), Fraction(minus_rhs, scale),
                              Fraction(plus_lhs, scale), Fraction(plus_rhs, scale))

"""Baselines and exact oracles: the random pivot algorithm and brute-force optima."""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np

from . import kernels
from .exact import CapabilityError
from .graph import UNIT, Clustering, Graph, WeightFn, cost_units, pair_matrices


@dataclass(frozen=True)
class OracleResult:
    clustering: Clustering
    cost: Fraction
    partitions_examined: int


def acn_pivot(g: Graph, rng) -> Clustering:
    """Random pivot: cluster a uniform unclustered vertex with its unclustered neighbors."""
    rng = np.random.default_rng(rng) if not isinstance(rng, np.random.Generator) else rng
    lab = np.full(g.n, -1, dtype=np.int64)
    order = rng.permutation(g.n)
    cid = 0
    # scanning a uniform permutation and skipping clustered vertices picks a
    # uniform unclustered pivot each time
    for v in order:
        if lab[v] >= 0:
            continue
        nb = g.neighbors(v)
        nb = nb[lab[nb] < 0]
        lab[v] = cid
        lab[nb] = cid
        cid += 1
    return Clustering(lab)


def acn_expected_cost(g: Graph, limit: int = 10) -> Fraction:
    """Exact expected unit cost of the random pivot algorithm, over all pivot orders."""
    if g.n > limit:
        raise CapabilityError(f"exact pivot expectation is limited to n <= {limit}")
    n = g.n
    nbr = [0] * n
    for v in range(n):
        for u in g.neighbors(v).tolist():
            nbr[v] |= 1 << u
    popcount = int.bit_count

    @lru_cache(maxsize=None)
    def expect(left: int) -> Fraction:
        if left == 0:
            return Fraction(0)
        total = Fraction(0)
        k = popcount(left)
        for v in range(n):
            if not (left >> v) & 1:
                continue
            cl = (nbr[v] & left) | (1 << v)
            rest = left & ~cl
            size = popcount(cl)
            internal_edges = sum(popcount(nbr[u] & cl) for u in range(n) if (cl >> u) & 1) // 2
            cut = sum(popcount(nbr[u] & rest) for u in range(n) if (cl >> u) & 1)
            here = size * (size - 1) // 2 - internal_edges + cut
            total += here + expect(rest)
        return total / k

    return expect((1 << n) - 1)


def restricted_growth_strings(n: int):
    """Yield every set partition of 0..n-1 as a restricted-growth tuple, lexicographically."""
    if n == 0:
        yield ()
        return
    a = [0] * n
    mx = [0] * n
    while True:
        yield tuple(a)
        i = n - 1
        while i > 0 and a[i] > mx[i - 1]:
            i -= 1
        if i == 0:
            return
        a[i] += 1
        mx[i] = max(mx[i - 1], a[i])
        for j in range(i + 1, n):
            a[j] = 0
            mx[j] = mx[i]


def _search(g: Graph, w: WeightFn, limit: int, req, forb, min_size, prune=True) -> OracleResult:
    if g.n > limit:
        raise CapabilityError(f"brute force is limited to n <= {limit}, got n = {g.n}")
    if g.n == 0:
        return OracleResult(Clustering(np.zeros(0, dtype=np.int64)), Fraction(0), 1)
    scale = w.scale
    plus, minus = pair_matrices(g, w, scale)
    labels, best, leaves = kernels.rgs_search(plus, minus, req, forb, min_size, prune)
    c = Clustering(labels)
    assert sum(cost_units(g, w, c, scale)) == best
    return OracleResult(c, Fraction(best, scale), leaves)


def brute_force_opt(g: Graph, w: WeightFn = UNIT, limit: int = 12, prune: bool = True) -> OracleResult:
    """Exact optimum; ties go to the lexicographically smallest restricted-growth string.

    With ``prune=False`` every partition is evaluated and ``partitions_examined``
    is the Bell number of n.
    """
    n = g.n
    z = np.zeros((n, n), dtype=bool)
    return _search(g, w, limit, z, z, np.zeros(n, dtype=np.int64), prune)


def brute_force_good_opt(g: Graph, pc, w: WeightFn = UNIT, limit: int = 12, delta=None) -> OracleResult:
    """Optimum over clusterings whose every cluster is good for the preclustering ``pc``."""
    from .precluster import good_constraints
    req, forb, min_size = good_constraints(g, pc, delta)
    return _search(g, w, limit, req, forb, min_size, True)

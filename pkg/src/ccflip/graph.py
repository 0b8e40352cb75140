"""Graphs, flip weight functions, clusterings and exact cost accounting.

Weights are 1 on non-edges and ``1 + sum(beta)`` over the flip layers that cut
an edge.  Every weight is kept as an integer multiple of ``1/scale`` where
``scale`` is the lcm of the layer denominators, so cost comparisons are exact.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from . import kernels

PLUS = "PLUS"
MINUS = "MINUS"


class GraphError(ValueError):
    pass


class Graph:
    """Simple undirected graph on vertices 0..n-1 stored as CSR."""

    def __init__(self, n: int, indptr: np.ndarray, indices: np.ndarray):
        self.n = int(n)
        self.indptr = np.ascontiguousarray(indptr, dtype=np.int64)
        self.indices = np.ascontiguousarray(indices, dtype=np.int64)
        self.degrees = np.diff(self.indptr)
        self.m = int(self.degrees.sum()) // 2
        self._keys = None
        self._dense = None
        for a in (self.indptr, self.indices, self.degrees):
            a.flags.writeable = False

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[Sequence[int]]) -> "Graph":
        e = np.asarray(list(edges), dtype=np.int64).reshape(-1, 2)
        if e.size:
            if e.min() < 0 or e.max() >= n:
                raise GraphError("edge endpoint out of range")
            if np.any(e[:, 0] == e[:, 1]):
                raise GraphError("self-loops are not allowed")
        e = np.sort(e, axis=1)
        e = np.unique(e, axis=0)
        both = np.vstack([e, e[:, ::-1]])
        order = np.lexsort((both[:, 1], both[:, 0]))
        both = both[order]
        indptr = np.zeros(n + 1, dtype=np.int64)
        np.cumsum(np.bincount(both[:, 0], minlength=n), out=indptr[1:])
        return cls(n, indptr, both[:, 1])

    @classmethod
    def from_dense(cls, adj) -> "Graph":
        adj = np.asarray(adj, dtype=bool)
        u, v = np.nonzero(np.triu(adj, 1))
        return cls.from_edges(adj.shape[0], zip(u.tolist(), v.tolist()))

    def neighbors(self, v: int) -> np.ndarray:
        return self.indices[self.indptr[v]:self.indptr[v + 1]]

    def degree(self, v: int) -> int:
        return int(self.degrees[v])

    def _edge_keys(self):
        if self._keys is None:
            src = np.repeat(np.arange(self.n, dtype=np.int64), self.degrees)
            self._keys = src * self.n + self.indices
        return self._keys

    def has_edges(self, us, vs) -> np.ndarray:
        us = np.asarray(us, dtype=np.int64)
        vs = np.asarray(vs, dtype=np.int64)
        keys = self._edge_keys()
        if keys.size == 0:
            return np.zeros(np.broadcast(us, vs).shape, dtype=bool)
        q = us * self.n + vs
        pos = np.minimum(np.searchsorted(keys, q), keys.size - 1)
        return keys[pos] == q

    def has_edge(self, u: int, v: int) -> bool:
        return bool(self.has_edges(u, v))

    def dense(self) -> np.ndarray:
        """Boolean adjacency matrix (cached; meant for small graphs)."""
        if self._dense is None:
            a = np.zeros((self.n, self.n), dtype=bool)
            src = np.repeat(np.arange(self.n), self.degrees)
            a[src, self.indices] = True
            a.flags.writeable = False
            self._dense = a
        return self._dense

    def edges(self) -> np.ndarray:
        """Edge list as an (m, 2) array with u < v, sorted."""
        src = np.repeat(np.arange(self.n, dtype=np.int64), self.degrees)
        keep = src < self.indices
        return np.stack([src[keep], self.indices[keep]], axis=1)

    def __repr__(self):
        return f"Graph(n={self.n}, m={self.m})"


def pair_class(g: Graph, u: int, v: int) -> str:
    if u == v:
        raise ValueError("pair_class needs two distinct vertices")
    return PLUS if g.has_edge(u, v) else MINUS


# ---------------------------------------------------------------- clusterings


def normalize_labels(labels) -> np.ndarray:
    """Relabel so that cluster ids appear in order of first appearance."""
    labels = np.asarray(labels, dtype=np.int64)
    _, first, inv = np.unique(labels, return_index=True, return_inverse=True)
    rank = np.empty(first.size, dtype=np.int64)
    rank[np.argsort(first, kind="stable")] = np.arange(first.size)
    return rank[inv.reshape(-1)]


class Clustering:
    """Immutable partition of 0..n-1, held as a normalized label array."""

    __slots__ = ("labels", "_sizes", "_hash")

    def __init__(self, labels):
        lab = normalize_labels(labels)
        lab.flags.writeable = False
        self.labels = lab
        self._sizes = None
        self._hash = None

    @classmethod
    def singletons(cls, n: int) -> "Clustering":
        return cls(np.arange(n))

    @classmethod
    def whole(cls, n: int) -> "Clustering":
        return cls(np.zeros(n, dtype=np.int64))

    @classmethod
    def from_clusters(cls, clusters: Iterable[Iterable[int]], n: int | None = None) -> "Clustering":
        clusters = [list(c) for c in clusters]
        if n is None:
            n = sum(len(c) for c in clusters)
        lab = np.full(n, -1, dtype=np.int64)
        for i, c in enumerate(clusters):
            if not c:
                raise GraphError("empty cluster")
            if np.any(lab[c] >= 0):
                raise GraphError("clusters overlap")
            lab[c] = i
        if np.any(lab < 0):
            raise GraphError("clusters do not cover every vertex")
        return cls(lab)

    @property
    def n(self) -> int:
        return self.labels.shape[0]

    @property
    def sizes(self) -> np.ndarray:
        if self._sizes is None:
            self._sizes = np.bincount(self.labels, minlength=self.n).astype(np.int64)
        return self._sizes

    @property
    def num_clusters(self) -> int:
        return int(self.labels.max()) + 1 if self.n else 0

    @property
    def clusters(self) -> list[tuple[int, ...]]:
        order = np.argsort(self.labels, kind="stable")
        bounds = np.cumsum(np.bincount(self.labels))[:-1]
        return [tuple(int(x) for x in part) for part in np.split(order, bounds)]

    def cluster_of(self, v: int) -> np.ndarray:
        return np.flatnonzero(self.labels == self.labels[v])

    def together(self, u, v):
        return self.labels[u] == self.labels[v]

    def add_cluster(self, s) -> "Clustering":
        return add_cluster(self, s)

    def __eq__(self, other):
        return isinstance(other, Clustering) and np.array_equal(self.labels, other.labels)

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(self.labels.tobytes())
        return self._hash

    def __repr__(self):
        return f"Clustering({[list(c) for c in self.clusters]})"


def _as_members(s, n: int) -> np.ndarray:
    members = np.unique(np.asarray(list(s) if not isinstance(s, np.ndarray) else s, dtype=np.int64))
    if members.size == 0:
        raise ValueError("candidate cluster must be nonempty")
    if members[0] < 0 or members[-1] >= n:
        raise ValueError("candidate cluster contains unknown vertices")
    return members


def add_cluster(c: Clustering, s) -> Clustering:
    """The clustering c + s: remove s from every cluster, then add s as a cluster."""
    members = _as_members(s, c.n)
    lab = c.labels.copy()
    lab[members] = c.n  # fresh id, renumbered by normalization
    return Clustering(lab)


# ---------------------------------------------------------------- weights


@dataclass(frozen=True)
class WeightFn:
    """Normal weight function: 1 on non-edges, 1 + sum of layer betas on cut edges.

    Each layer is a (clustering, beta) pair and raises the weight of every edge
    the clustering cuts.
    """

    layers: tuple = ()

    @property
    def scale(self) -> int:
        s = 1
        for _, beta in self.layers:
            s = math.lcm(s, Fraction(beta).denominator)
        return s

    @property
    def W(self) -> Fraction:
        return 1 + sum((Fraction(b) for _, b in self.layers), Fraction(0))

    def flip(self, c: Clustering, beta) -> "WeightFn":
        """Add beta to every edge cut by ``c``."""
        beta = Fraction(beta)
        if beta < 0:
            raise ValueError("beta must be nonnegative")
        return WeightFn(self.layers + ((c, beta),))

    def layer_arrays(self, scale: int | None = None):
        scale = self.scale if scale is None else scale
        n = self.layers[0][0].n if self.layers else 0
        lab = np.zeros((len(self.layers), n), dtype=np.int64)
        units = np.zeros(len(self.layers), dtype=np.int64)
        for i, (c, beta) in enumerate(self.layers):
            lab[i] = c.labels
            units[i] = int(Fraction(beta) * scale)
        if not self.layers:
            lab = lab.reshape(0, 0)
        return lab, units

    def pair_units(self, g: Graph, us, vs, scale: int | None = None) -> np.ndarray:
        """Weights of pairs (us[i], vs[i]) in units of 1/scale."""
        scale = self.scale if scale is None else scale
        us = np.asarray(us, dtype=np.int64)
        vs = np.asarray(vs, dtype=np.int64)
        w = np.full(np.broadcast(us, vs).shape, scale, dtype=np.int64)
        adj = g.has_edges(us, vs)
        for c, beta in self.layers:
            cut = c.labels[us] != c.labels[vs]
            w += np.where(adj & cut, int(Fraction(beta) * scale), 0)
        return w

    def edge_units(self, g: Graph, scale: int | None = None) -> np.ndarray:
        """Weights aligned with ``g.indices`` (one entry per directed CSR slot)."""
        scale = self.scale if scale is None else scale
        src = np.repeat(np.arange(g.n, dtype=np.int64), g.degrees)
        w = np.full(g.indices.shape[0], scale, dtype=np.int64)
        for c, beta in self.layers:
            w += int(Fraction(beta) * scale) * (c.labels[src] != c.labels[g.indices])
        return w

    def weight(self, g: Graph, u: int, v: int) -> Fraction:
        return Fraction(int(self.pair_units(g, u, v)), self.scale)


UNIT = WeightFn()


# ---------------------------------------------------------------- costs


@dataclass(frozen=True)
class CostBreakdown:
    plus: Fraction
    minus: Fraction

    @property
    def total(self) -> Fraction:
        return self.plus + self.minus

    @property
    def doubled(self) -> int:
        """2 * total as an int; raises if the total is not a multiple of 1/2."""
        d = 2 * self.total
        if d.denominator != 1:
            raise ValueError(f"cost {self.total} is not a half-integer")
        return int(d)


def _check_partition(g: Graph, c: Clustering):
    if c.n != g.n:
        raise GraphError(f"clustering covers {c.n} vertices, graph has {g.n}")


def cost_units(g: Graph, w: WeightFn, c: Clustering, scale: int | None = None) -> tuple[int, int]:
    """(plus, minus) in units of 1/scale."""
    _check_partition(g, c)
    scale = w.scale if scale is None else scale
    return kernels.cost_units(c.labels, g.indptr, g.indices, w.edge_units(g, scale), scale)


def cost(g: Graph, w: WeightFn, c: Clustering) -> CostBreakdown:
    scale = w.scale
    plus, minus = cost_units(g, w, c, scale)
    return CostBreakdown(Fraction(plus, scale), Fraction(minus, scale))


def total_cost(g: Graph, c: Clustering, w: WeightFn = UNIT) -> Fraction:
    return cost(g, w, c).total


class DeltaEvaluator:
    """Reusable evaluator of cost(c + s) - cost(c) for a fixed (g, w, c)."""

    def __init__(self, g: Graph, w: WeightFn, c: Clustering, scale: int | None = None):
        _check_partition(g, c)
        self.g, self.w, self.c = g, w, c
        self.scale = w.scale if scale is None else scale
        self.ew = w.edge_units(g, self.scale)

    def units(self, s) -> int:
        members = _as_members(s, self.g.n)
        return kernels.delta_units(self.c.labels, self.c.sizes, self.g.indptr, self.g.indices,
                                   self.ew, self.scale, members)

    def __call__(self, s) -> Fraction:
        return Fraction(self.units(s), self.scale)


def delta_cost(g: Graph, w: WeightFn, c: Clustering, s) -> Fraction:
    """cost(c + s) - cost(c), touching only pairs with an endpoint in s."""
    return DeltaEvaluator(g, w, c)(s)


def pair_matrices(g: Graph, w: WeightFn, scale: int | None = None):
    """Dense (plus, minus) cost matrices in units: the price of cutting / joining each pair."""
    scale = w.scale if scale is None else scale
    n = g.n
    adj = g.dense()
    iu = np.arange(n)
    W = w.pair_units(g, iu[:, None], iu[None, :], scale)
    plus = np.where(adj, W, 0)
    minus = np.where(adj, 0, scale)
    np.fill_diagonal(minus, 0)
    return plus.astype(np.int64), minus.astype(np.int64)


# ---------------------------------------------------------------- file formats


def read_graph(path) -> Graph:
    with open(path) as fh:
        head = fh.readline().split()
        if len(head) != 2:
            raise GraphError("graph header must be 'n m'")
        n, m = int(head[0]), int(head[1])
        edges = []
        for line in fh:
            if line.strip():
                u, v = map(int, line.split())
                if u >= v:
                    raise GraphError(f"edge line '{line.strip()}' must have u < v")
                edges.append((u, v))
    if len(edges) != m:
        raise GraphError(f"header says {m} edges, file has {len(edges)}")
    g = Graph.from_edges(n, edges)
    if g.m != m:
        raise GraphError("duplicate edges in graph file")
    return g


def write_graph(g: Graph, path) -> None:
    with open(path, "w") as fh:
        fh.write(f"{g.n} {g.m}\n")
        for u, v in g.edges().tolist():
            fh.write(f"{u} {v}\n")


def read_clustering(path, n: int | None = None) -> Clustering:
    with open(path) as fh:
        clusters = [list(map(int, line.split())) for line in fh if line.strip()]
    return Clustering.from_clusters(clusters, n)


def write_clustering(c: Clustering, path) -> None:
    with open(path, "w") as fh:
        for cl in c.clusters:
            fh.write(" ".join(map(str, cl)) + "\n")

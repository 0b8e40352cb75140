"""Instance generators and the textual instance descriptors used by the CLI.

Descriptors:
    hamming:3,5,5:2            grid with edges between points at Hamming distance <= 2
    planted:5,20,0.9,0.05:1    5 planted clusters of 20, p_in, p_out, seed 1
    gnp:8,0.5:3                Erdos-Renyi G(n, p), seed 3
    cliques:3,4,5              disjoint cliques of the given sizes
"""
from __future__ import annotations

from itertools import product

import numpy as np

from .graph import Clustering, Graph


def make_rng(seed) -> np.random.Generator:
    """Counter-based generator so that streams can be split reproducibly."""
    ss = seed if isinstance(seed, np.random.SeedSequence) else np.random.SeedSequence(seed)
    return np.random.Generator(np.random.Philox(ss))


def gen_hamming(dims=(3, 5, 5), radius: int = 2):
    """Grid points (row-major, first axis slowest) joined when they differ in <= radius coordinates.

    Returns (graph, coords).
    """
    coords = np.array(list(product(*[range(d) for d in dims])), dtype=np.int64)
    diff = (coords[:, None, :] != coords[None, :, :]).sum(axis=2)
    adj = (diff <= radius) & (diff > 0)
    return Graph.from_dense(adj), coords


def axis_clustering(coords: np.ndarray, axis: int) -> Clustering:
    return Clustering(coords[:, axis])


def gen_planted(k: int, size: int, p_in: float, p_out: float, seed=0):
    """Planted partition: k blocks of ``size`` vertices.  Returns (graph, truth)."""
    rng = make_rng(seed)
    n = k * size
    truth = np.repeat(np.arange(k), size)
    iu, ju = np.triu_indices(n, 1)
    p = np.where(truth[iu] == truth[ju], p_in, p_out)
    keep = rng.random(iu.size) < p
    g = Graph.from_edges(n, np.stack([iu[keep], ju[keep]], axis=1))
    return g, Clustering(truth)


def gen_gnp(n: int, p: float, seed=0) -> Graph:
    rng = make_rng(seed)
    iu, ju = np.triu_indices(n, 1)
    keep = rng.random(iu.size) < p
    return Graph.from_edges(n, np.stack([iu[keep], ju[keep]], axis=1))


def gen_cliques(sizes) -> Graph:
    edges = []
    start = 0
    for s in sizes:
        for a in range(start, start + s):
            for b in range(a + 1, start + s):
                edges.append((a, b))
        start += s
    return Graph.from_edges(start, edges)


def parse_instance(desc: str):
    """Build an instance from a descriptor; returns (graph, extras dict)."""
    kind, _, rest = desc.partition(":")
    parts = rest.split(":") if rest else []
    try:
        if kind == "hamming":
            dims = tuple(int(x) for x in parts[0].split(","))
            radius = int(parts[1]) if len(parts) > 1 else 2
            g, coords = gen_hamming(dims, radius)
            return g, {"coords": coords}
        if kind == "planted":
            k, size, p_in, p_out = parts[0].split(",")
            seed = int(parts[1]) if len(parts) > 1 else 0
            g, truth = gen_planted(int(k), int(size), float(p_in), float(p_out), seed)
            return g, {"truth": truth}
        if kind == "gnp":
            n, p = parts[0].split(",")
            seed = int(parts[1]) if len(parts) > 1 else 0
            return gen_gnp(int(n), float(p), seed), {}
        if kind == "cliques":
            return gen_cliques([int(x) for x in parts[0].split(",")]), {}
    except (IndexError, ValueError) as exc:
        raise ValueError(f"malformed instance descriptor {desc!r}") from exc
    raise ValueError(f"unknown instance kind {kind!r}")

"""Local search engines: exhaustive subset search, fixed candidate families,
and a hook into the sampled search for larger graphs."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import kernels
from .graph import UNIT, Clustering, DeltaEvaluator, Graph, WeightFn, cost_units, pair_matrices

EXHAUSTIVE = "exhaustive"
SAMPLED = "sampled"
FIXED_FAMILY = "fixed_family"


class CapabilityError(RuntimeError):
    """Raised when an exact routine is asked to handle an instance that is too large."""


@dataclass
class SearchEngine:
    mode: str = EXHAUSTIVE
    limit: int = 16
    family: Sequence = ()
    threshold: int = 0  # minimum improvement, in weight units
    sampled_config: object = None
    precluster: object = None
    max_moves: int | None = None

    def __post_init__(self):
        if self.mode not in (EXHAUSTIVE, SAMPLED, FIXED_FAMILY):
            raise ValueError(f"unknown engine mode {self.mode!r}")


def _subset_delta_table(g: Graph, w: WeightFn, c: Clustering, scale: int) -> np.ndarray:
    plus, minus = pair_matrices(g, w, scale)
    A = minus - plus
    L = (c.labels[:, None] == c.labels[None, :]).astype(np.int64)
    return kernels.subset_deltas(A, L)


def _mask_members(mask: int, n: int) -> tuple[int, ...]:
    return tuple(i for i in range(n) if (mask >> i) & 1)


def _lex_best(masks, n):
    return min((_mask_members(int(m), n) for m in masks))


def _check_limit(g: Graph, limit: int):
    if g.n > limit:
        raise CapabilityError(f"exhaustive search is limited to n <= {limit}, got n = {g.n}")


def best_move(g: Graph, w: WeightFn, c: Clustering, engine: SearchEngine):
    """Best strictly improving candidate (delta in units, members) or None."""
    scale = w.scale
    if engine.mode == EXHAUSTIVE:
        _check_limit(g, engine.limit)
        d = _subset_delta_table(g, w, c, scale)
        best = int(d.min())
        if best >= 0 or -best < engine.threshold:
            return None
        return best, _lex_best(np.flatnonzero(d == best), g.n)
    if engine.mode == FIXED_FAMILY:
        ev = DeltaEvaluator(g, w, c, scale)
        found = None
        for s in engine.family:
            s = tuple(sorted(int(x) for x in s))
            dv = ev.units(s)
            if found is None or dv < found[0] or (dv == found[0] and s < found[1]):
                found = (dv, s)
        if found is None or found[0] >= 0 or -found[0] < engine.threshold:
            return None
        return found
    raise ValueError("best_move is only defined for exact engines")


def is_local_optimum(g: Graph, w: WeightFn, c: Clustering, limit: int = 16) -> bool:
    """True iff no nonempty S makes c + S strictly cheaper."""
    _check_limit(g, limit)
    return int(_subset_delta_table(g, w, c, w.scale).min()) >= 0


def run_local_search(g: Graph, w: WeightFn = UNIT, start: Clustering | None = None,
                     engine: SearchEngine | None = None, rng_seed=0, trace: list | None = None) -> Clustering:
    """Apply best improving moves until none is left.

    ``trace`` (if given) receives the unit cost after every accepted move.
    """
    engine = engine or SearchEngine()
    c = Clustering.singletons(g.n) if start is None else start
    if engine.mode == SAMPLED:
        from .sampled import faster_local_search
        res = faster_local_search(g, engine.precluster, w=w, config=engine.sampled_config,
                                  seed=rng_seed, start=start)
        if trace is not None:
            trace.extend(res.costs)
        return res.clustering
    moves = 0
    while engine.max_moves is None or moves < engine.max_moves:
        mv = best_move(g, w, c, engine)
        if mv is None:
            break
        c = c.add_cluster(mv[1])
        moves += 1
        if trace is not None:
            trace.append(sum(cost_units(g, w, c)))
    return c


def axis_family(coords: np.ndarray) -> list[tuple[int, ...]]:
    """Every axis slice of a grid plus every singleton, for FIXED_FAMILY engines."""
    fam = []
    for ax in range(coords.shape[1]):
        for val in np.unique(coords[:, ax]):
            fam.append(tuple(np.flatnonzero(coords[:, ax] == val).tolist()))
    fam.extend((v,) for v in range(coords.shape[0]))
    return fam


def cleaning_pass(g: Graph, c: Clustering) -> Clustering:
    """Extract vertices adjacent to fewer than half of the other members of their cluster.

    Vertices are scanned in ascending id and the scan restarts after each
    extraction.
    """
    lab = c.labels.copy()
    nxt = c.n
    while True:
        moved = False
        for v in range(g.n):
            members = np.flatnonzero(lab == lab[v])
            if members.size <= 1:
                continue
            nb = g.neighbors(v)
            inside = int(np.count_nonzero(lab[nb] == lab[v]))
            if 2 * inside < members.size - 1:
                lab[v] = nxt
                nxt += 1
                moved = True
                break
        if not moved:
            return Clustering(lab)


def is_clean(g: Graph, c: Clustering, w: WeightFn = UNIT) -> bool:
    """No vertex strictly benefits from becoming a singleton."""
    ev = DeltaEvaluator(g, w, c)
    return all(ev.units((v,)) >= 0 for v in range(g.n))

"""Flip pipelines: local search, raise the weight of the edges it cut, search
again; and the iterated version that combines three solutions with pivot3."""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from fractions import Fraction

import numpy as np

from .exact import SearchEngine, run_local_search
from .graph import UNIT, Clustering, DeltaEvaluator, Graph, WeightFn, cost
from .pivot import pivot3


def k_for_alpha(alpha) -> int:
    """Iteration count 1 + ceil(2 / (2/13 - alpha))."""
    alpha = Fraction(alpha).limit_denominator(10**6) if isinstance(alpha, float) else Fraction(alpha)
    gap = Fraction(2, 13) - alpha
    if gap <= 0:
        raise ValueError("alpha must be below 2/13")
    return 1 + math.ceil(2 / gap)


@dataclass
class FlipSchedule:
    beta: Fraction = Fraction(1, 2)
    k: int | None = None
    alpha: Fraction = Fraction(1, 10)
    epsilon: Fraction = Fraction(1, 10)
    gamma: Fraction | None = None
    engine: SearchEngine = field(default_factory=SearchEngine)

    def __post_init__(self):
        self.beta = Fraction(self.beta)
        if self.beta <= 0:
            raise ValueError("beta must be positive")
        if self.k is None:
            self.k = k_for_alpha(self.alpha)
        if self.k < 0:
            raise ValueError("k must be nonnegative")


@dataclass
class PipelineTrace:
    solutions: list = field(default_factory=list)  # (label, clustering, original cost)
    weights: dict = field(default_factory=dict)  # label -> WeightFn the stage optimized
    b_values: list = field(default_factory=list)  # (label, b)

    def add(self, label, c, g, w=None):
        self.solutions.append((label, c, cost(g, UNIT, c).total))
        if w is not None:
            self.weights[label] = w

    @property
    def best(self):
        """(label, clustering, cost) of the cheapest solution, earliest on ties."""
        return min(self.solutions, key=lambda s: s[2])

    @property
    def labels(self):
        return [s[0] for s in self.solutions]

    def clustering(self, label) -> Clustering:
        return next(s[1] for s in self.solutions if s[0] == label)


def flip_weights(w: WeightFn, l: Clustering, beta) -> WeightFn:
    return w.flip(l, beta)


def _seeds(seed, k):
    return np.random.SeedSequence(seed).spawn(k)


def two_round(g: Graph, engine: SearchEngine | None = None, seed=0, starts=None) -> PipelineTrace:
    """Ls1 under unit weights, Ls2 after doubling the edges Ls1 cuts; keep the better.

    ``starts`` optionally gives the start clustering of each round (default
    all singletons).
    """
    engine = engine or SearchEngine()
    s1, s2 = starts if starts is not None else (None, None)
    ss = _seeds(seed, 2)
    tr = PipelineTrace()
    ls1 = run_local_search(g, UNIT, s1, engine, ss[0])
    tr.add("Ls1", ls1, g, UNIT)
    w2 = flip_weights(UNIT, ls1, 1)
    ls2 = run_local_search(g, w2, s2, engine, ss[1])
    tr.add("Ls2", ls2, g, w2)
    return tr


def iterated_flipping(g: Graph, schedule: FlipSchedule | None = None, precluster=None, seed=0,
                      reference: Clustering | None = None) -> PipelineTrace:
    """C0' under unit weights, then for i = 1..k:

    w_i = w_0 + beta * cut(C'_{i-1}),  C_i local optimum for w_i,
    w_i' = w_i + beta * cut(C_i),     C_i' local optimum for w_i',
    C_i'' = pivot3(C'_{i-1}, C_i, C_i').
    """
    sch = schedule or FlipSchedule()
    engine = sch.engine
    if precluster is not None and engine.precluster is None:
        engine = replace(engine, precluster=precluster)
    start = precluster.initial_clustering() if precluster is not None else None
    ss = iter(_seeds(seed, 2 * sch.k + 1))
    tr = PipelineTrace()

    def record_b(label, c):
        if reference is not None:
            tr.b_values.append((label, b_value(c, reference, g)))

    prev = run_local_search(g, UNIT, start, engine, next(ss))
    tr.add("C0'", prev, g, UNIT)
    record_b("C0'", prev)
    for i in range(1, sch.k + 1):
        wi = flip_weights(UNIT, prev, sch.beta)
        ci = run_local_search(g, wi, start, engine, next(ss))
        tr.add(f"C{i}", ci, g, wi)
        wip = flip_weights(wi, ci, sch.beta)
        cip = run_local_search(g, wip, start, engine, next(ss))
        tr.add(f"C{i}'", cip, g, wip)
        record_b(f"C{i}'", cip)
        tr.add(f"C{i}''", pivot3(prev, ci, cip), g)
        prev = cip
    return tr


def b_value(c_prime: Clustering, reference: Clustering, g: Graph) -> Fraction:
    """(|E- inside c'| + 2 |E+ cut by both reference and c'|) / Cost(reference)."""
    ref_cost = cost(g, UNIT, reference).total
    if ref_cost == 0:
        raise ValueError("b_value needs a reference of positive cost")
    e = g.edges()
    u, v = e[:, 0], e[:, 1]
    both_cut = int(np.count_nonzero((reference.labels[u] != reference.labels[v])
                                    & (c_prime.labels[u] != c_prime.labels[v])))
    minus = cost(g, UNIT, c_prime).minus
    return (minus + 2 * both_cut) / ref_cost


def is_gamma_good_local_optimum(g: Graph, w: WeightFn, c: Clustering, reference: Clustering,
                                gamma, num_admissible: int) -> bool:
    """sum over clusters C of the reference of Cost_w(c) - Cost_w(c + C) <= 2 gamma |E_adm|."""
    ev = DeltaEvaluator(g, w, c)
    gain = sum(-ev(cl) for cl in reference.clusters)
    return gain <= 2 * Fraction(gamma) * num_admissible

"""Sampling-based local search.

Stay/move costs describe what happens at a vertex v when a candidate cluster K
(with v in K) is carved out of the current clustering: either v stays behind in
its old cluster or it moves along with K.  The estimators replace the sums over
K by averages over a length-eta0 sample drawn with replacement, scaled by a
size guess s_tilde.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product

import numpy as np

from . import kernels
from .generators import make_rng
from .graph import UNIT, Clustering, DeltaEvaluator, Graph, WeightFn, cost_units
from .precluster import PreclusteredInstance, neighborhoods


@dataclass
class SampleConfig:
    eta: int = 2
    eta_prime: int = 16
    s: int = 64  # size of the subsets T^i drawn from N(r)
    sample_tuples: int = 4  # sample sequences drawn per T^i
    gamma: Fraction | None = None  # default eps^13 / 8
    tau: Fraction | None = None  # default 6 / eta
    stagnation: int = 8  # stop after stagnation * n * ceil(log2 n) idle rounds
    max_rounds: int | None = None

    def __post_init__(self):
        if int(self.eta) != self.eta or self.eta < 2:
            raise ValueError("eta must be an integer >= 2")
        self.eta = int(self.eta)

    @property
    def eta0(self) -> int:
        return self.eta ** 5

    @property
    def eps_prime(self) -> Fraction:
        return Fraction(1, self.eta ** 2)

    def tau_value(self) -> Fraction:
        return Fraction(6, self.eta) if self.tau is None else Fraction(self.tau)

    def gamma_value(self, epsilon) -> Fraction:
        return Fraction(epsilon) ** 13 / 8 if self.gamma is None else Fraction(self.gamma)


TAU_PRESETS = {
    "6/eta": lambda eta: Fraction(6, eta),
    "6/eta^2": lambda eta: Fraction(6, eta ** 2),
    "12/eta^2": lambda eta: Fraction(12, eta ** 2),
}


# ---------------------------------------------------------------- exact stay / move costs


def _check_member(K, v):
    K = np.unique(np.asarray(list(K), dtype=np.int64))
    if v not in set(K.tolist()):
        raise ValueError("v must belong to K")
    return K


def _weights_to(g: Graph, w: WeightFn, v: int, us) -> np.ndarray:
    """Units of w(v, u) on edges, 0 on non-edges."""
    us = np.asarray(us, dtype=np.int64)
    adj = g.has_edges(np.full(us.shape, v), us) & (us != v)
    return np.where(adj, w.pair_units(g, np.full(us.shape, v), us), 0), adj


def cost_stays(g: Graph, w: WeightFn, c: Clustering, K, v: int) -> Fraction:
    """Weight of violated pairs at v in c + (K - {v})."""
    K = _check_member(K, v)
    scale = w.scale
    Kp = K[K != v]
    C = c.cluster_of(v)
    CK = np.intersect1d(C, Kp)
    wv, av = _weights_to(g, w, v, np.arange(g.n))
    dw, dwC, dwCK = wv.sum(), wv[C].sum(), wv[CK].sum()
    d_C, d_CK = av[C].sum(), av[CK].sum()
    units = dw - dwC + dwCK + scale * (C.size - CK.size - d_C + d_CK - 1)
    return Fraction(int(units), scale)


def cost_moves(g: Graph, w: WeightFn, c: Clustering, K, v: int) -> Fraction:
    """Weight of violated pairs at v once v sits in K."""
    K = _check_member(K, v)
    scale = w.scale
    wv, av = _weights_to(g, w, v, np.arange(g.n))
    units = wv.sum() - wv[K].sum() + scale * (K.size - av[K].sum() - 1)
    return Fraction(int(units), scale)


def violated_at(g: Graph, w: WeightFn, c: Clustering, v: int) -> Fraction:
    """Direct count of the weight of violated pairs incident to v."""
    wv, av = _weights_to(g, w, v, np.arange(g.n))
    same = c.labels == c.labels[v]
    same[v] = False
    units = wv[~same].sum() + w.scale * np.count_nonzero(same & ~av)
    return Fraction(int(units), w.scale)


# ---------------------------------------------------------------- estimators


class VertexStats:
    """Per-vertex quantities of the current clustering, in weight units."""

    def __init__(self, g: Graph, w: WeightFn, c: Clustering, scale: int | None = None):
        self.scale = w.scale if scale is None else scale
        ew = w.edge_units(g, self.scale)
        src = np.repeat(np.arange(g.n), g.degrees)
        same = c.labels[src] == c.labels[g.indices]
        n = g.n
        self.dw = np.bincount(src, weights=ew, minlength=n).astype(np.int64)
        self.dw_c = np.bincount(src[same], weights=ew[same], minlength=n).astype(np.int64)
        self.d_c = np.bincount(src[same], minlength=n).astype(np.int64)
        self.csize = c.sizes[c.labels].astype(np.int64)
        self.layer_labels, self.layer_units = w.layer_arrays(self.scale)
        if self.layer_labels.shape[0] == 0:
            self.layer_labels = np.zeros((0, n), dtype=np.int64)
        self.labels = c.labels


def _est_numerators(g, w, c, S, s_tilde, vs, stats=None):
    S = np.asarray(S, dtype=np.int64)
    if S.size == 0:
        raise ValueError("the sample must be nonempty")
    st = stats or VertexStats(g, w, c)
    return kernels.est_terms(vs, S, int(s_tilde), st.labels, g.indptr, g.indices,
                             st.layer_labels, st.layer_units, st.scale,
                             st.dw, st.dw_c, st.csize, st.d_c), st


def est_cost_stays(S, s_tilde, v: int, g: Graph, w: WeightFn, c: Clustering) -> Fraction:
    """d_w(v) - d_w(v,C) + |C| - d(v,C) - 1 + (s~/eta0) sum_{u_i in C - v} (w(v,u_i) + [vu_i in E] - 1)."""
    (stays, _), st = _est_numerators(g, w, c, S, s_tilde, [v])
    return Fraction(int(stays[0]), len(S) * st.scale)


def est_cost_moves(S, s_tilde, v: int, g: Graph, w: WeightFn, c: Clustering) -> Fraction:
    """d_w(v) + s~ - 1 - (s~/eta0) sum_i (w(v,u_i) + [vu_i in E])."""
    (_, moves), st = _est_numerators(g, w, c, S, s_tilde, [v])
    return Fraction(int(moves[0]), len(S) * st.scale)


def neighbor_cluster_terms(xs, v: int, g: Graph, w: WeightFn, c: Clustering):
    """(|N(v)|/eta') * sum [x_j in C(v)] w(x_j, v) and the unweighted analogue."""
    xs = np.asarray(xs, dtype=np.int64)
    deg = g.degree(v)
    inc = c.labels[xs] == c.labels[v]
    wu = w.pair_units(g, np.full(xs.shape, v), xs)
    wsum = Fraction(int(wu[inc].sum()), w.scale)
    return deg * wsum / len(xs), Fraction(deg * int(inc.sum()), len(xs))


def est_cost_diff_sampled(S, s_tilde, v: int, eta_prime: int, rng, g: Graph, w: WeightFn,
                          c: Clustering, xs=None) -> Fraction:
    """Estimate of stays - moves that never touches d_w(v).

    The cluster degrees d_w(v, C(v)) and d(v, C(v)) come from eta' uniform
    neighbor samples ``xs`` (drawn from ``rng`` unless given).
    """
    if g.degree(v) == 0:
        raise ValueError("v must have at least one neighbor")
    S = np.asarray(S, dtype=np.int64)
    if S.size == 0:
        raise ValueError("the sample must be nonempty")
    if xs is None:
        rng = np.random.default_rng(rng)
        xs = rng.choice(g.neighbors(v), size=eta_prime, replace=True)
    dwc_hat, dc_hat = neighbor_cluster_terms(xs, v, g, w, c)
    wu, adj = _weights_to(g, w, v, S)
    scale = w.scale
    inc = (c.labels[S] == c.labels[v]) & (S != v)
    term = np.where(adj, wu + scale, 0)
    s_st = Fraction(int(np.where(inc, term - scale, 0).sum()), scale)
    s_mv = Fraction(int(term.sum()), scale)
    eta0 = len(S)
    csize = int(c.sizes[c.labels[v]])
    stays_part = -dwc_hat + csize - dc_hat - 1 + Fraction(s_tilde, eta0) * s_st
    moves_part = s_tilde - 1 - Fraction(s_tilde, eta0) * s_mv
    return stays_part - moves_part


def improvement_terms(g: Graph, w: WeightFn, c: Clustering, s_prime, r: int):
    """X_u for every u in S' xor C(r), summing exactly to Cost(c) - Cost(c + S')."""
    n = g.n
    Sp = np.unique(np.asarray(list(s_prime), dtype=np.int64))
    inS = np.zeros(n, dtype=bool)
    inS[Sp] = True
    inC = c.labels == c.labels[r]
    D = np.flatnonzero(inS ^ inC)
    new = c.add_cluster(Sp)
    scale = w.scale
    allv = np.arange(n)
    out = {}
    for u in D.tolist():
        wu = w.pair_units(g, np.full(n, u), allv)
        adj = g.has_edges(np.full(n, u), allv)
        old_t = c.labels == c.labels[u]
        new_t = new.labels == new.labels[u]
        old = np.where(adj, np.where(old_t, 0, wu), np.where(old_t, scale, 0))
        nw = np.where(adj, np.where(new_t, 0, wu), np.where(new_t, scale, 0))
        diff = old - nw
        diff[u] = 0
        out[u] = Fraction(2 * int(diff.sum()) - int(diff[D].sum()), 2 * scale)
    return out


def est_improvement(c: Clustering, s_prime, r: int, eta_prime: int, rng, w: WeightFn, g: Graph,
                    samples=None) -> Fraction:
    """(|S' xor C(r)| / eta') * sum_j X_{u_j} for u_j uniform in S' xor C(r)."""
    X = improvement_terms(g, w, c, s_prime, r)
    if not X:
        return Fraction(0)
    D = np.array(sorted(X), dtype=np.int64)
    if samples is None:
        rng = np.random.default_rng(rng)
        samples = rng.choice(D, size=eta_prime, replace=True)
    total = sum((X[int(u)] for u in samples), Fraction(0))
    return total * D.size / len(samples)


# ---------------------------------------------------------------- cluster generation


def size_grid(epsilon, d_r: int, eta: int) -> list[int]:
    """Distinct rounded sizes eps*d(r)*(1+eps')^k/2 for (1+eps')^k <= 4/eps."""
    epsilon = Fraction(epsilon)
    step = 1 + Fraction(1, eta ** 2)
    out = set()
    f = Fraction(1)
    while f <= 4 / epsilon:
        out.add(max(1, round(epsilon * d_r * f / 2)))
        f *= step
    return sorted(out)


def batch_decisions(block, S, s_tilde, nr_size, stats: VertexStats, g: Graph, W: Fraction,
                    tau: Fraction) -> np.ndarray:
    """Which vertices of ``block`` pass EstStays > EstMoves + tau * W * |N(r)|."""
    block = np.asarray(block, dtype=np.int64)
    if block.size == 0:
        return np.zeros(0, dtype=bool)
    S = np.asarray(S, dtype=np.int64)
    stays, moves = kernels.est_terms(block, S, int(s_tilde), stats.labels, g.indptr, g.indices,
                                     stats.layer_labels, stats.layer_units, stats.scale,
                                     stats.dw, stats.dw_c, stats.csize, stats.d_c)
    # both sides carry a factor eta0 * scale; tau * W = p / q after clearing
    tw = Fraction(tau) * Fraction(W)
    rhs = tw.numerator * S.size * stats.scale * nr_size
    return tw.denominator * (stays - moves) > rhs


def generate_cluster(c: Clustering, r: int, samples, sizes, pc: PreclusteredInstance, w: WeightFn,
                     config: SampleConfig, g: Graph, stats: VertexStats | None = None) -> np.ndarray:
    """K(r) plus every v of D(r) whose batch test passes; batch i uses samples[i], sizes[i]."""
    N, K, D = neighborhoods(pc, g, r)
    blocks = np.array_split(D, config.eta)
    st = stats or VertexStats(g, w, c)
    tau = config.tau_value()
    parts = [K]
    for i, block in enumerate(blocks):
        keep = batch_decisions(block, samples[i], sizes[i], N.size, st, g, w.W, tau)
        parts.append(block[keep])
    return np.unique(np.concatenate(parts))


# ---------------------------------------------------------------- driver


@dataclass
class SearchResult:
    clustering: Clustering
    costs: list = field(default_factory=list)  # unit cost (in weight units) after each accepted move
    rounds: int = 0
    accepted: int = 0  # accepted moves
    pivots: int = 0
    combinations: int = 0
    scale: int = 1

    @property
    def initial_cost(self) -> Fraction:
        return Fraction(self.costs[0], self.scale)

    @property
    def final_cost(self) -> Fraction:
        return Fraction(self.costs[-1], self.scale)


def pivot_probabilities(g: Graph) -> np.ndarray:
    d = g.degrees.astype(np.float64)
    p = np.zeros(g.n)
    nz = d > 0
    p[nz] = 1.0 / (g.n * d[nz])
    return p


def candidate_clusters(c: Clustering, r: int, pc: PreclusteredInstance, w: WeightFn,
                       config: SampleConfig, g: Graph, rng, stats: VertexStats):
    """Distinct outputs of generate_cluster over every sample / size combination.

    Each batch decision only depends on its own (sample, size) pair, so the
    grid^eta size vectors are enumerated over the distinct per-batch outcomes.
    Returns (candidates, logical combination count).
    """
    N, K, D = neighborhoods(pc, g, r)
    grid = size_grid(pc.epsilon, g.degree(r), config.eta)
    blocks = np.array_split(D, config.eta)
    tau = config.tau_value()
    t_size = min(config.s, N.size)
    seen = {}
    for _ in range(config.sample_tuples):
        per_batch = []
        for block in blocks:
            T = rng.choice(N, size=t_size, replace=False)
            S = rng.choice(T, size=config.eta0, replace=True)
            outcomes = {}
            for s_tilde in grid:
                keep = batch_decisions(block, S, s_tilde, N.size, stats, g, w.W, tau)
                outcomes.setdefault(keep.tobytes(), block[keep])
            per_batch.append(list(outcomes.values()))
        for choice in product(*per_batch):
            cand = np.unique(np.concatenate([K, *choice]))
            seen.setdefault(cand.tobytes(), cand)
    count = config.sample_tuples * len(grid) ** config.eta
    return list(seen.values()), count


def faster_local_search(g: Graph, pc: PreclusteredInstance, w: WeightFn = UNIT,
                        config: SampleConfig | None = None, seed=0, start: Clustering | None = None,
                        ) -> SearchResult:
    """Randomized local search from atoms + singletons.

    Every round tries one uniform singleton, then with probability 1/(n d(r))
    picks pivot r and evaluates the generated candidate clusters.  A move is
    taken when it improves the cost by at least gamma |E_adm| / n.
    """
    config = config or SampleConfig()
    if pc is None:
        raise ValueError("the sampled search needs a preclustered instance")
    rng = make_rng(seed)
    n = g.n
    c = pc.initial_clustering() if start is None else start
    scale = w.scale
    gamma = config.gamma_value(pc.epsilon)
    # improvement (units) * n >= gamma * |E_adm| * scale
    need = gamma * pc.num_admissible * scale
    res = SearchResult(c, [sum(cost_units(g, w, c, scale))], scale=scale)
    if n <= 1:
        return res
    limit = config.stagnation * n * max(1, math.ceil(math.log2(n)))
    probs = pivot_probabilities(g)
    cum = np.cumsum(probs)
    idle = 0

    def acceptable(gain: int) -> bool:
        return gain > 0 and gain * n >= need

    ev = DeltaEvaluator(g, w, c, scale)
    stats = None
    while idle < limit and (config.max_rounds is None or res.rounds < config.max_rounds):
        res.rounds += 1
        changed = False
        rp = int(rng.integers(n))
        gain = -ev.units((rp,))
        if acceptable(gain):
            c = c.add_cluster((rp,))
            changed = True
            res.accepted += 1
            ev, stats = DeltaEvaluator(g, w, c, scale), None
            res.costs.append(res.costs[-1] - gain)
        u = rng.random()
        if u < cum[-1]:
            r = int(np.searchsorted(cum, u, side="right"))
            res.pivots += 1
            if stats is None:
                stats = VertexStats(g, w, c, scale)
            cands, count = candidate_clusters(c, r, pc, w, config, g, rng, stats)
            res.combinations += count
            best = None
            for cand in cands:
                dv = ev.units(cand)
                if best is None or dv < best[0]:
                    best = (dv, cand)
            if best is not None and acceptable(-best[0]):
                c = c.add_cluster(best[1])
                changed = True
                res.accepted += 1
                ev, stats = DeltaEvaluator(g, w, c, scale), None
                res.costs.append(res.costs[-1] + best[0])
        if changed:
            idle = 0
        else:
            idle += 1
    res.clustering = c
    return res


def sampled_local_search(g: Graph, pc: PreclusteredInstance, w: WeightFn = UNIT,
                         config: SampleConfig | None = None, seed=0, start=None) -> Clustering:
    return faster_local_search(g, pc, w, config, seed, start).clustering

"""Invariant suites: exact desk-scale checks of the structural lemmas.

Each suite returns a :class:`SuiteResult`; the CLI ``verify`` command and the
acceptance tests both run these.
"""
from __future__ import annotations

import functools
import time
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations, product

import numpy as np

from . import kernels
from .exact import SearchEngine, axis_family, run_local_search
from .flip import FlipSchedule, iterated_flipping, two_round
from .generators import axis_clustering, gen_gnp, gen_hamming, gen_planted, make_rng
from .graph import UNIT, Clustering, DeltaEvaluator, Graph, WeightFn, cost
from .oracle import acn_expected_cost, acn_pivot, brute_force_opt
from .pivot import verify_pivot_lemma, verify_special_bound
from .precluster import neighborhoods, preclustering, validate_good_instance
from .sampled import (SampleConfig, VertexStats, cost_moves, cost_stays, faster_local_search,
                      improvement_terms)


@dataclass
class SuiteResult:
    name: str
    passed: int = 0
    total: int = 0
    failures: list = field(default_factory=list)
    info: dict = field(default_factory=dict)
    seconds: float = 0.0

    @property
    def ok(self) -> bool:
        return self.passed == self.total and not self.failures

    def check(self, cond: bool, what=None):
        self.total += 1
        if cond:
            self.passed += 1
        elif len(self.failures) < 20:
            self.failures.append(what)
        return cond

    def line(self) -> str:
        status = "PASS" if self.ok else "FAIL"
        return f"{status} {self.name}: {self.passed}/{self.total} ({self.seconds:.2f}s)"


def _timed(fn):
    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        t0 = time.perf_counter()
        res = fn(*args, **kwargs)
        res.seconds = time.perf_counter() - t0
        return res
    return wrapper


def random_small_graph(rng, n_lo=4, n_hi=8) -> Graph:
    n = int(rng.integers(n_lo, n_hi + 1))
    p = float(rng.uniform(0.2, 0.8))
    return gen_gnp(n, p, int(rng.integers(2**31)))


def random_clustering(rng, n: int) -> Clustering:
    k = int(rng.integers(1, n + 1))
    return Clustering(rng.integers(0, k, size=n))


# ---------------------------------------------------------------- local optimum inequalities


def prop_ls_check(g: Graph, ls: Clustering) -> np.ndarray:
    """Per-partition booleans for the four local-optimum inequalities (unit weights).

    Every set partition of V is enumerated; returns a (Bell(n), 4) array.
    """
    n = g.n
    R = kernels.all_rgs(n).astype(np.int64)
    iu, ju = np.triu_indices(n, 1)
    plus = g.has_edges(iu, ju).astype(np.int64)
    minus = 1 - plus
    in_ls = (ls.labels[iu] == ls.labels[ju]).astype(np.int64)
    inC = (R[:, iu] == R[:, ju]).astype(np.int64)
    exC = 1 - inC
    cmin = inC @ minus
    cplus = exC @ plus
    ccost = cmin + cplus
    a1 = inC @ (plus * (1 - in_ls))
    a2 = exC @ (plus * (1 - in_ls))
    b1 = inC @ (minus * in_ls)
    b2 = exC @ (minus * in_ls)
    ls_minus = int((minus * in_ls).sum())
    ls_cost = ls_minus + int((plus * (1 - in_ls)).sum())
    return np.stack([
        cmin + 2 * cplus >= a1 + 2 * a2 + b1 + 2 * b2,
        ls_cost <= 2 * ccost - cmin - b2 - a2,
        ls_cost <= 2 * ccost - cmin - a2,
        ls_cost <= 2 * ccost - ls_minus - a2,
    ], axis=1)


@_timed
def suite_prop_ls(trials=200, seed=0) -> SuiteResult:
    res = SuiteResult("prop-ls")
    rng = make_rng(seed)
    partitions = 0
    for t in range(trials):
        g = random_small_graph(rng)
        ls = run_local_search(g, UNIT, None, SearchEngine())
        ok = prop_ls_check(g, ls)
        partitions += ok.shape[0]
        res.check(bool(ok.all()), (t, g.n, np.argwhere(~ok)[:3].tolist()))
    res.info["partitions"] = partitions
    return res


@_timed
def suite_two_round(trials=200, seed=0) -> SuiteResult:
    res = SuiteResult("two-round")
    rng = make_rng(seed)
    worst = Fraction(0)
    for t in range(trials):
        g = random_small_graph(rng)
        best = two_round(g, SearchEngine()).best[2]
        opt = brute_force_opt(g).cost
        if opt:
            worst = max(worst, best / opt)
        res.check(8 * best <= 15 * opt, (t, best, opt))
    res.info["worst_ratio"] = str(worst)
    return res


@_timed
def suite_iterated(trials=100, seed=0, k=39) -> SuiteResult:
    res = SuiteResult("iterated-flipping")
    rng = make_rng(seed)
    worst = Fraction(0)
    sch = FlipSchedule(beta=Fraction(1, 2), k=k)
    for t in range(trials):
        g = random_small_graph(rng)
        best = iterated_flipping(g, sch).best[2]
        opt = brute_force_opt(g).cost
        if opt:
            worst = max(worst, best / opt)
        res.check(13 * best <= 24 * opt, (t, best, opt))
    res.info["worst_ratio"] = str(worst)
    return res


# ---------------------------------------------------------------- pivot


@_timed
def suite_pivot(trials=500, seed=0) -> SuiteResult:
    res = SuiteResult("pivot")
    rng = make_rng(seed)
    for t in range(trials):
        n = int(rng.integers(2, 31))
        g = gen_gnp(n, float(rng.uniform(0.05, 0.9)), int(rng.integers(2**31)))
        cs = [random_clustering(rng, n) for _ in range(3)]
        if rng.random() < 0.3:
            # correlated inputs exercise the small-distance classes
            cs[1] = cs[0]
        rep = verify_pivot_lemma(g, *cs)
        bound = verify_special_bound(g, *cs, w=WeightFn().flip(cs[0], Fraction(1, 2)))
        res.check(rep.ok and bound.ok, (t, rep.special, rep.paid))
    return res


# ---------------------------------------------------------------- estimators


def _random_weights(rng, n, W) -> WeightFn:
    if W == 1:
        return UNIT
    if rng.random() < 0.5:
        return UNIT.flip(random_clustering(rng, n), 1)
    return UNIT.flip(random_clustering(rng, n), Fraction(1, 2)).flip(random_clustering(rng, n), Fraction(1, 2))


@_timed
def suite_estimators(graphs=6, seed=0, max_k=4, max_eta0=3) -> SuiteResult:
    """Exhaustive averages of the stay/move estimators and of the improvement estimator."""
    res = SuiteResult("estimators")
    rng = make_rng(seed)
    for gi in range(graphs):
        g = random_small_graph(rng, 3, 6)
        n = g.n
        c = random_clustering(rng, n)
        for W in (1, 2):
            w = _random_weights(rng, n, W)
            st = VertexStats(g, w, c)
            for v in range(n):
                others = [u for u in range(n) if u != v]
                for extra in range(max_k):
                    for rest in combinations(others, extra):
                        K = np.array(sorted((v,) + rest), dtype=np.int64)
                        exact_s = cost_stays(g, w, c, K, v)
                        exact_m = cost_moves(g, w, c, K, v)
                        for eta0 in range(1, max_eta0 + 1):
                            tuples = np.array(list(product(K.tolist(), repeat=eta0)), dtype=np.int64)
                            tot_s = tot_m = 0
                            for S in tuples:
                                s_num, m_num = kernels.est_terms(
                                    [v], S, K.size, st.labels, g.indptr, g.indices, st.layer_labels,
                                    st.layer_units, st.scale, st.dw, st.dw_c, st.csize, st.d_c)
                                tot_s += int(s_num[0])
                                tot_m += int(m_num[0])
                            denom = len(tuples) * eta0 * st.scale
                            res.check(Fraction(tot_s, denom) == exact_s, ("stays", gi, W, v, K.tolist(), eta0))
                            res.check(Fraction(tot_m, denom) == exact_m, ("moves", gi, W, v, K.tolist(), eta0))
            # improvement estimator: every small symmetric difference
            for _ in range(8):
                r = int(rng.integers(n))
                Sp = np.flatnonzero(rng.random(n) < 0.5)
                if Sp.size == 0:
                    Sp = np.array([r])
                X = improvement_terms(g, w, c, Sp, r)
                if not X or len(X) > max_k:
                    continue
                D = sorted(X)
                exact = -DeltaEvaluator(g, w, c)(Sp)
                for eta_p in range(1, max_eta0 + 1):
                    tuples = list(product(D, repeat=eta_p))
                    avg = sum((sum((X[u] for u in tup), Fraction(0)) * len(D) / eta_p for tup in tuples),
                              Fraction(0)) / len(tuples)
                    res.check(avg == exact, ("improvement", gi, W, r, Sp.tolist(), eta_p))
    return res


@_timed
def suite_concentration(trials=1000, seed=0, k_size=1000, eta=4) -> SuiteResult:
    """Fraction of trials whose estimate misses by more than W s / eta^2."""
    res = SuiteResult("concentration")
    rng = make_rng(seed)
    n = k_size + 200
    g = gen_gnp(n, 0.3, int(rng.integers(2**31)))
    c = Clustering(rng.integers(0, 10, size=n))
    w = UNIT.flip(Clustering(rng.integers(0, 4, size=n)), 1)  # W = 2
    v = 0
    K = np.concatenate([[v], rng.choice(np.arange(1, n), size=k_size - 1, replace=False)])
    exact_s = cost_stays(g, w, c, K, v)
    exact_m = cost_moves(g, w, c, K, v)
    st = VertexStats(g, w, c)
    eta0 = eta ** 5
    tol = Fraction(w.W * k_size, eta ** 2)
    bad = 0
    for _ in range(trials):
        S = rng.choice(K, size=eta0, replace=True)
        s_num, m_num = kernels.est_terms([v], S, k_size, st.labels, g.indptr, g.indices, st.layer_labels,
                                         st.layer_units, st.scale, st.dw, st.dw_c, st.csize, st.d_c)
        es = Fraction(int(s_num[0]), eta0 * st.scale)
        em = Fraction(int(m_num[0]), eta0 * st.scale)
        if abs(es - exact_s) > tol or abs(em - exact_m) > tol:
            bad += 1
    frac = bad / trials
    res.info["fraction"] = frac
    res.check(frac <= 0.59, frac)
    return res


# ---------------------------------------------------------------- baselines


@_timed
def suite_acn(trials=100, seed=0) -> SuiteResult:
    res = SuiteResult("acn")
    rng = make_rng(seed)
    for t in range(trials):
        g = random_small_graph(rng, 2, 6)
        exp = acn_expected_cost(g)
        opt = brute_force_opt(g).cost
        res.check(exp <= 3 * opt, (t, exp, opt))
    return res


# ---------------------------------------------------------------- preclustering


def size_lemma_violations(g: Graph, pc) -> list:
    """Vertices breaking |N(v)| <= 6 eps^-3 d(v) or |N(r)| <= 12 eps^-4 d(v) for v in N(r).

    Isolated vertices are skipped: N(v) = {v} while the bound is 0.
    """
    eps = pc.epsilon
    out = []
    sizes = {}
    for v in range(g.n):
        N, _, _ = neighborhoods(pc, g, v)
        sizes[v] = N
    for r in range(g.n):
        N = sizes[r]
        d_r = g.degree(r)
        if d_r > 0 and N.size * eps ** 3 > 6 * d_r:
            out.append(("N", r))
        for v in N.tolist():
            d_v = g.degree(v)
            if d_v > 0 and N.size * eps ** 4 > 12 * d_v:
                out.append(("Nr", r, v))
    return out


@_timed
def suite_sizes(trials=100, seed=0, epsilons=(Fraction(1, 10), Fraction(1, 5), Fraction(1, 3))) -> SuiteResult:
    res = SuiteResult("preclustering")
    rng = make_rng(seed)
    for t in range(trials):
        if t % 2:
            k = int(rng.integers(2, 6))
            size = int(rng.integers(3, 12))
            g, _ = gen_planted(k, size, float(rng.uniform(0.6, 1.0)), float(rng.uniform(0.0, 0.15)),
                               int(rng.integers(2**31)))
        else:
            g = gen_gnp(int(rng.integers(5, 50)), float(rng.uniform(0.05, 0.6)), int(rng.integers(2**31)))
        eps = epsilons[t % len(epsilons)]
        pc = preclustering(g, eps)
        rep = validate_good_instance(g, pc)
        res.check(rep.adm_degree_ok and rep.degree_ratio_ok,
                  ("conditions", t, rep.adm_degree_witnesses[:3], rep.degree_ratio_witnesses[:3]))
        res.check(rep.atoms_ok, ("atoms", t, rep.atom_witnesses[:3]))
        bad = size_lemma_violations(g, pc)
        res.check(not bad, ("sizes", t, bad[:3]))
    return res


# ---------------------------------------------------------------- instances


@_timed
def suite_hamming() -> SuiteResult:
    res = SuiteResult("hamming")
    g, coords = gen_hamming((3, 5, 5), 2)
    costs = [cost(g, UNIT, axis_clustering(coords, a)).total for a in range(3)]
    res.check(costs == [675, 1050, 1050], costs)
    res.check(costs[1] / costs[0] == Fraction(14, 9), costs)
    y = axis_clustering(coords, 1)
    ev = DeltaEvaluator(g, UNIT, y)
    for s in axis_family(coords):
        res.check(ev.units(s) >= 0, s)
    res.info["costs"] = [str(x) for x in costs]
    return res


@_timed
def suite_end_to_end(seed=1, acn_seeds=100, epsilon=Fraction(1, 10), config: SampleConfig | None = None) -> SuiteResult:
    res = SuiteResult("end-to-end")
    g, truth = gen_planted(5, 20, 0.9, 0.05, seed)
    pc = preclustering(g, epsilon)
    out = faster_local_search(g, pc, UNIT, config, seed)
    init, final = out.initial_cost, out.final_cost
    acn_mean = sum((cost(g, UNIT, acn_pivot(g, make_rng(s))).total for s in range(acn_seeds)),
                   Fraction(0)) / acn_seeds
    res.check(final <= init, ("final > initial", final, init))
    res.check(final <= acn_mean, ("final > acn mean", final, acn_mean))
    res.check(all(a >= b for a, b in zip(out.costs, out.costs[1:])), "cost increased")
    res.check(final == cost(g, UNIT, out.clustering).total, "trace disagrees with the clustering")
    # initial-cost bound against the brute-force optimum on a small planted instance
    g8, _ = gen_planted(2, 4, 0.8, 0.2, seed)
    pc8 = preclustering(g8, epsilon)
    init8 = cost(g8, UNIT, pc8.initial_clustering()).total
    opt8 = brute_force_opt(g8).cost
    res.check(init8 <= opt8 + 4 / epsilon * pc8.num_admissible, (init8, opt8, pc8.num_admissible))
    res.info.update(initial=str(init), final=str(final), acn_mean=float(acn_mean),
                    truth=str(cost(g, UNIT, truth).total), atoms=len(pc.atoms),
                    accepted=out.accepted, rounds=out.rounds)
    return res


SUITES = {
    "hamming": suite_hamming,
    "prop-ls": suite_prop_ls,
    "two-round": suite_two_round,
    "iterated": suite_iterated,
    "pivot": suite_pivot,
    "estimators": suite_estimators,
    "concentration": suite_concentration,
    "acn": suite_acn,
    "e2e": suite_end_to_end,
    "sizes": suite_sizes,
}

from fractions import Fraction
from itertools import product

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from ccflip.generators import gen_cliques, gen_gnp, gen_planted
from ccflip.graph import UNIT, Clustering, Graph, cost, delta_cost
from ccflip.precluster import neighborhoods, preclustering
from ccflip.sampled import (TAU_PRESETS, SampleConfig, VertexStats, cost_moves, cost_stays,
                            est_cost_diff_sampled, est_cost_moves, est_cost_stays, est_improvement,
                            faster_local_search, generate_cluster, improvement_terms,
                            neighbor_cluster_terms, sampled_local_search, size_grid, violated_at)

from strategies import clusterings, graph_and_clustering, subsets


def mean(xs):
    xs = list(xs)
    return sum(xs, Fraction(0)) / len(xs)


# ---- exact stay / move costs

def test_cost_moves_singleton_is_degree():
    g = gen_gnp(7, 0.5, 1)
    c = Clustering.whole(7)
    w = UNIT.flip(Clustering.singletons(7), Fraction(1, 2))
    for v in range(7):
        assert cost_moves(g, w, c, (v,), v) == Fraction(3, 2) * g.degree(v)


def test_cost_moves_perfect_cluster(k3):
    assert cost_moves(k3, UNIT, Clustering.singletons(3), (0, 1, 2), 1) == 0


def test_cost_stays_triangle(k3):
    assert cost_stays(k3, UNIT, Clustering.whole(3), (0, 1), 1) == 1


def test_cost_requires_membership(k3):
    with pytest.raises(ValueError):
        cost_stays(k3, UNIT, Clustering.whole(3), (0, 1), 2)
    with pytest.raises(ValueError):
        cost_moves(k3, UNIT, Clustering.whole(3), (0,), 2)


@given(graph_and_clustering(min_n=1, max_n=7), st.data())
def test_stay_move_costs_match_direct_count(gc, data):
    g, c = gc
    K = data.draw(subsets(g.n))
    v = data.draw(st.sampled_from(K))
    w = UNIT.flip(data.draw(clusterings(g.n)), Fraction(1, 2))
    Kp = tuple(u for u in K if u != v)
    stay = violated_at(g, w, c.add_cluster(Kp), v) if Kp else violated_at(g, w, c, v)
    assert cost_stays(g, w, c, K, v) == stay
    assert cost_moves(g, w, c, K, v) == violated_at(g, w, c.add_cluster(K), v)


# ---- sample estimators

def test_moves_estimate_with_non_neighbor_samples():
    g = Graph.from_edges(6, [(0, 1), (0, 2)])
    c = Clustering([0, 0, 0, 1, 2, 3])
    S = [3, 4, 5, 4]
    assert est_cost_moves(S, 4, 0, g, UNIT, c) == g.degree(0) + 4 - 1


@given(graph_and_clustering(min_n=1, max_n=6), st.data())
def test_each_element_once_is_exact(gc, data):
    g, c = gc
    K = data.draw(subsets(g.n))
    v = data.draw(st.sampled_from(K))
    w = UNIT.flip(data.draw(clusterings(g.n)), 1)
    assert est_cost_stays(K, len(K), v, g, w, c) == cost_stays(g, w, c, K, v)
    assert est_cost_moves(K, len(K), v, g, w, c) == cost_moves(g, w, c, K, v)


@given(graph_and_clustering(min_n=1, max_n=5), st.data())
def test_estimators_unbiased(gc, data):
    g, c = gc
    K = data.draw(subsets(g.n).filter(lambda s: len(s) <= 4))
    v = data.draw(st.sampled_from(K))
    eta0 = data.draw(st.integers(1, 2))
    tuples = list(product(K, repeat=eta0))
    assert mean(est_cost_stays(S, len(K), v, g, UNIT, c) for S in tuples) == cost_stays(g, UNIT, c, K, v)
    assert mean(est_cost_moves(S, len(K), v, g, UNIT, c) for S in tuples) == cost_moves(g, UNIT, c, K, v)


def test_empty_sample_rejected(k3):
    with pytest.raises(ValueError):
        est_cost_stays([], 1, 0, k3, UNIT, Clustering.whole(3))


# ---- neighbor-sampled difference

def test_neighbor_term_vanishes_for_singleton_cluster(k3):
    c = Clustering.singletons(3)
    assert neighbor_cluster_terms([1, 2, 1], 0, k3, UNIT, c) == (0, 0)


def test_neighbor_term_full_when_all_neighbors_inside(k3):
    c = Clustering.whole(3)
    for xs in ([1], [2, 2], [1, 2, 1]):
        assert neighbor_cluster_terms(xs, 0, k3, UNIT, c) == (2, 2)


def test_isolated_vertex_rejected():
    g = Graph.from_edges(3, [(0, 1)])
    with pytest.raises(ValueError):
        est_cost_diff_sampled([0], 1, 2, 1, 0, g, UNIT, Clustering.whole(3))


def test_diff_expectation_over_neighbors():
    g = gen_gnp(6, 0.6, 7)
    c = Clustering([0, 0, 1, 1, 0, 2])
    w = UNIT.flip(Clustering([0, 1, 0, 1, 0, 1]), Fraction(1, 2))
    v = int(np.argmax(g.degrees))
    nb = g.neighbors(v).tolist()
    S = [v, (v + 1) % 6, (v + 3) % 6]
    want = est_cost_stays(S, 3, v, g, w, c) - est_cost_moves(S, 3, v, g, w, c)
    for eta_p in (1, 2):
        got = mean(est_cost_diff_sampled(S, 3, v, eta_p, None, g, w, c, xs=list(xs))
                   for xs in product(nb, repeat=eta_p))
        assert got == want


# ---- improvement estimate

def test_improvement_zero_when_unchanged():
    g = gen_gnp(6, 0.5, 2)
    c = Clustering([0, 0, 1, 1, 2, 2])
    assert est_improvement(c, (0, 1), 0, 4, 0, UNIT, g) == 0


@given(graph_and_clustering(min_n=2, max_n=7), st.data())
def test_improvement_terms_sum(gc, data):
    g, c = gc
    s = data.draw(subsets(g.n))
    r = data.draw(st.sampled_from(s))
    w = UNIT.flip(data.draw(clusterings(g.n)), Fraction(1, 2))
    X = improvement_terms(g, w, c, s, r)
    assert sum(X.values(), Fraction(0)) == -delta_cost(g, w, c, s)
    D = sorted(X)
    if 0 < len(D) <= 4:
        for eta_p in (1, 2):
            got = mean(est_improvement(c, s, r, eta_p, None, w, g, samples=list(t))
                       for t in product(D, repeat=eta_p))
            assert got == -delta_cost(g, w, c, s)


def test_improvement_single_vertex_exact():
    g = gen_gnp(6, 0.5, 3)
    c = Clustering([0, 0, 0, 1, 1, 1])
    s = (0, 1, 2, 3)
    assert est_improvement(c, s, 0, 1, 5, UNIT, g) == -delta_cost(g, UNIT, c, s)


# ---- cluster generation

def test_size_grid():
    grid = size_grid(Fraction(1, 10), 40, 2)
    assert grid == sorted(set(grid)) and grid[0] == 2
    assert grid[-1] <= 80
    assert size_grid(Fraction(1, 10), 0, 2) == [1]


def test_generate_cluster_empty_D():
    g = gen_cliques([4, 4])
    pc = preclustering(g, Fraction(1, 10))
    cfg = SampleConfig()
    c = pc.initial_clustering()
    out = generate_cluster(c, 0, [[0], [0]], [1, 1], pc, UNIT, cfg, g)
    assert out.tolist() == [0, 1, 2, 3]


def test_generate_cluster_all_fail():
    g = gen_cliques([6, 6])
    pc = preclustering(g, Fraction(1, 2), atoms=[])
    cfg = SampleConfig()
    c = Clustering.singletons(12)
    S = [6, 7, 8, 9]  # non-neighbors of every candidate
    out = generate_cluster(c, 0, [S, S], [10 ** 6, 10 ** 6], pc, UNIT, cfg, g)
    assert out.tolist() == [0]


def test_generate_cluster_recovers_planted_clique():
    g = gen_cliques([10, 10])
    pc = preclustering(g, Fraction(1, 2), atoms=[])
    cfg = SampleConfig(eta=3, tau=TAU_PRESETS["6/eta^2"](3))
    N, K, D = neighborhoods(pc, g, 0)
    assert N.tolist() == list(range(10))
    c = Clustering.singletons(20)
    rng = np.random.default_rng(0)
    samples = [rng.choice(np.arange(1, 10), cfg.eta0) for _ in range(3)]
    out = generate_cluster(c, 0, samples, [10, 10, 10], pc, UNIT, cfg, g)
    assert out.tolist() == list(range(10))


def test_config_validation():
    with pytest.raises(ValueError):
        SampleConfig(eta=1)
    cfg = SampleConfig()
    assert cfg.eta0 == 32 and cfg.tau_value() == 3
    assert cfg.gamma_value(Fraction(1, 10)) == Fraction(1, 10) ** 13 / 8


# ---- driver

def test_cliques_start_optimal():
    g = gen_cliques([4, 5, 6])
    pc = preclustering(g, Fraction(1, 10))
    res = faster_local_search(g, pc, seed=0)
    assert res.initial_cost == 0 and res.final_cost == 0 and res.accepted == 0


def test_driver_requires_preclustering(k3):
    with pytest.raises(ValueError):
        faster_local_search(k3, None)


def test_driver_deterministic_and_monotone():
    g, _ = gen_planted(3, 12, 0.8, 0.1, 4)
    pc = preclustering(g, Fraction(1, 10))
    cfg = SampleConfig(tau=Fraction(1, 4), max_rounds=400)
    a = faster_local_search(g, pc, UNIT, cfg, seed=9)
    b = faster_local_search(g, pc, UNIT, cfg, seed=9)
    assert a.clustering == b.clustering and a.costs == b.costs
    assert all(x > y for x, y in zip(a.costs, a.costs[1:]))
    assert a.final_cost == cost(g, UNIT, a.clustering).total
    assert sampled_local_search(g, pc, UNIT, cfg, seed=9) == a.clustering


def test_driver_with_flipped_weights():
    g, truth = gen_planted(3, 10, 0.8, 0.1, 5)
    pc = preclustering(g, Fraction(1, 10))
    w = UNIT.flip(pc.initial_clustering(), Fraction(1, 2))
    res = faster_local_search(g, pc, w, SampleConfig(tau=Fraction(1, 4), max_rounds=300), seed=1)
    assert res.scale == 2
    assert res.final_cost == cost(g, w, res.clustering).total <= res.initial_cost


def test_vertex_stats():
    g = gen_gnp(8, 0.5, 6)
    c = Clustering([0, 0, 1, 1, 0, 2, 2, 1])
    st_ = VertexStats(g, UNIT, c)
    assert np.array_equal(st_.dw, g.degrees)
    assert st_.layer_labels.shape == (0, 8)

from fractions import Fraction

import pytest
from hypothesis import given, settings

from ccflip.exact import FIXED_FAMILY, SearchEngine, axis_family, run_local_search
from ccflip.flip import (FlipSchedule, b_value, flip_weights, is_gamma_good_local_optimum,
                         iterated_flipping, k_for_alpha, two_round)
from ccflip.generators import axis_clustering, gen_gnp
from ccflip.graph import UNIT, Clustering, Graph, cost
from ccflip.oracle import brute_force_opt

from strategies import graphs


def test_k_for_alpha():
    assert k_for_alpha(Fraction(1, 10)) == 39
    assert k_for_alpha(0.1) == 39
    with pytest.raises(ValueError):
        k_for_alpha(Fraction(2, 13))


def test_schedule_validation():
    assert FlipSchedule().k == 39
    with pytest.raises(ValueError):
        FlipSchedule(beta=0)
    with pytest.raises(ValueError):
        FlipSchedule(k=-1)


def test_two_round_cliques(cliques):
    assert two_round(cliques).best[2] == 0


def test_two_round_hard_instance(hamming):
    g, coords = hamming
    y, z = axis_clustering(coords, 1), axis_clustering(coords, 2)
    eng = SearchEngine(mode=FIXED_FAMILY, family=axis_family(coords))
    tr = two_round(g, eng, starts=(y, z))
    assert tr.clustering("Ls1") == y and tr.clustering("Ls2") == z
    best = tr.best[2]
    assert best == 1050
    assert best / cost(g, UNIT, axis_clustering(coords, 0)).total == Fraction(14, 9)
    assert cost(g, tr.weights["Ls2"], y).total == 2100


@settings(max_examples=30)
@given(graphs(min_n=3, max_n=7))
def test_two_round_ratio(g):
    opt = brute_force_opt(g).cost
    assert 8 * two_round(g).best[2] <= 15 * opt


def test_iterated_k0_and_labels():
    g = gen_gnp(6, 0.5, 1)
    tr = iterated_flipping(g, FlipSchedule(k=0))
    assert tr.labels == ["C0'"]
    tr = iterated_flipping(g, FlipSchedule(k=2))
    assert tr.labels == ["C0'", "C1", "C1'", "C1''", "C2", "C2'", "C2''"]
    assert tr.best[2] == min(s[2] for s in tr.solutions)


def test_iterated_cliques(cliques):
    tr = iterated_flipping(cliques, FlipSchedule(k=3))
    assert tr.solutions[0][2] == 0 and tr.best[0] == "C0'"


def test_iterated_weights_accumulate():
    g = gen_gnp(6, 0.6, 2)
    tr = iterated_flipping(g, FlipSchedule(k=1))
    w1 = tr.weights["C1"]
    assert w1.layers[0][0] == tr.clustering("C0'") and w1.layers[0][1] == Fraction(1, 2)
    w1p = tr.weights["C1'"]
    assert len(w1p.layers) == 2 and w1p.layers[1][0] == tr.clustering("C1")


@settings(max_examples=15)
@given(graphs(min_n=3, max_n=7))
def test_iterated_ratio(g):
    opt = brute_force_opt(g).cost
    assert 13 * iterated_flipping(g, FlipSchedule(k=39)).best[2] <= 24 * opt


def test_b_value_self_reference():
    # triangle plus pendant edge: optimum is {0,1,2},{3}
    g = Graph.from_edges(4, [(0, 1), (0, 2), (1, 2), (2, 3)])
    ref = brute_force_opt(g).clustering
    br = cost(g, UNIT, ref)
    assert b_value(ref, ref, g) == (br.minus + 2 * br.plus) / br.total


def test_b_value_singletons_on_clique_like():
    g = Graph.from_edges(4, [(0, 1), (0, 2), (1, 2), (2, 3)])
    ref = Clustering.from_clusters([[0, 1, 2], [3]])
    b = b_value(Clustering.singletons(4), ref, g)
    assert b * cost(g, UNIT, ref).total <= 2 * cost(g, UNIT, ref).plus


def test_b_value_zero_reference(k3):
    with pytest.raises(ValueError):
        b_value(Clustering.whole(3), Clustering.whole(3), k3)


def test_iterated_records_b_values():
    g = gen_gnp(6, 0.5, 3)
    ref = brute_force_opt(g).clustering
    tr = iterated_flipping(g, FlipSchedule(k=2), reference=ref)
    assert [l for l, _ in tr.b_values] == ["C0'", "C1'", "C2'"]


def test_gamma_good_local_optimum():
    g = gen_gnp(7, 0.5, 4)
    ls = run_local_search(g)
    ref = brute_force_opt(g).clustering
    assert is_gamma_good_local_optimum(g, UNIT, ls, ref, 0, 1)
    k3 = Graph.from_edges(3, [(0, 1), (0, 2), (1, 2)])
    s = Clustering.singletons(3)
    # swapping in the whole triangle gains 3
    assert not is_gamma_good_local_optimum(k3, UNIT, s, Clustering.whole(3), 1, 1)
    assert is_gamma_good_local_optimum(k3, UNIT, s, Clustering.whole(3), Fraction(3, 2), 1)
    assert flip_weights(UNIT, ls, 1).W == 2

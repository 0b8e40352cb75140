from fractions import Fraction

import pytest
from hypothesis import given

from ccflip.exact import CapabilityError
from ccflip.generators import gen_cliques, gen_gnp, make_rng
from ccflip.graph import UNIT, Clustering, Graph, cost
from ccflip.oracle import (acn_expected_cost, acn_pivot, brute_force_good_opt, brute_force_opt,
                           restricted_growth_strings)
from ccflip.precluster import preclustering

from strategies import graphs


def test_rgs_count_and_order():
    rows = list(restricted_growth_strings(5))
    assert len(rows) == 52
    assert rows == sorted(rows)
    assert rows[0] == (0, 0, 0, 0, 0) and rows[-1] == (0, 1, 2, 3, 4)
    assert list(restricted_growth_strings(0)) == [()]


def test_acn_cliques(cliques):
    for s in range(10):
        assert cost(cliques, UNIT, acn_pivot(cliques, make_rng(s))).total == 0


def test_acn_path_expected_is_one(path3):
    assert acn_expected_cost(path3) == 1
    for s in range(10):
        assert cost(path3, UNIT, acn_pivot(path3, make_rng(s))).total == 1


def test_acn_c4_within_three_opt(c4):
    assert acn_expected_cost(c4) == 3
    assert acn_expected_cost(c4) <= 3 * brute_force_opt(c4).cost


def test_acn_expected_matches_order_enumeration():
    from itertools import permutations
    g = gen_gnp(5, 0.5, 4)
    total = Fraction(0)
    perms = list(permutations(range(5)))
    for order in perms:
        lab = [-1] * 5
        for cid, v in enumerate(order):
            if lab[v] >= 0:
                continue
            lab[v] = v + 10
            for u in g.neighbors(v).tolist():
                if lab[u] < 0:
                    lab[u] = v + 10
        total += cost(g, UNIT, Clustering(lab)).total
    assert acn_expected_cost(g) == total / len(perms)


def test_brute_force_small_cases(k3, path3, c4):
    assert brute_force_opt(k3).cost == 0
    assert brute_force_opt(k3).clustering == Clustering.whole(3)
    assert brute_force_opt(path3).cost == 1
    res = brute_force_opt(c4, prune=False)
    assert res.cost == 2 and res.partitions_examined == 15
    assert brute_force_opt(path3, prune=False).partitions_examined == 5


def test_brute_force_limit():
    with pytest.raises(CapabilityError):
        brute_force_opt(gen_gnp(13, 0.5, 0))


def test_brute_force_n12():
    g = gen_gnp(12, 0.4, 1)
    res = brute_force_opt(g)
    assert cost(g, UNIT, res.clustering).total == res.cost


@given(graphs(min_n=1, max_n=6))
def test_brute_force_is_minimum(g):
    res = brute_force_opt(g)
    best = min(cost(g, UNIT, Clustering(r)).total for r in restricted_growth_strings(g.n))
    assert res.cost == best
    assert res.partitions_examined >= 1


def test_good_opt_two_atoms_joined_by_edge():
    g = gen_cliques([4, 4])
    g = Graph.from_edges(8, g.edges().tolist() + [(3, 4)])
    pc = preclustering(g, Fraction(1, 10), atoms=[(0, 1, 2, 3), (4, 5, 6, 7)])
    res = brute_force_good_opt(g, pc)
    assert res.cost == 1
    assert sorted(res.clustering.clusters) == [(0, 1, 2, 3), (4, 5, 6, 7)]


def test_good_opt_at_least_unrestricted():
    g = gen_gnp(8, 0.5, 2)
    pc = preclustering(g, Fraction(1, 3))
    assert brute_force_good_opt(g, pc).cost >= brute_force_opt(g).cost


def test_good_opt_vacuous_restriction():
    g = Graph.from_edges(4, [(0, 1), (1, 2), (2, 3), (0, 3), (0, 2), (1, 3)])
    pc = preclustering(g, Fraction(1, 2), atoms=[])
    assert pc.num_admissible == 6
    assert brute_force_good_opt(g, pc, delta=Fraction(0)).cost == brute_force_opt(g).cost

from __future__ import annotations

import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from helpers import oracle_max_cycle_packing, random_graph, random_tree
from twdecomp.applications import (CYCLE_PACKING, CycleFamily, EPConfig, EPOutcome, ParameterPlugin,
                                   cycle_packing_dp, divide_bound, ep_cycles, ep_mod_cycles, fpt_decide,
                                   fpt_run, fpt_threshold, max_packing)
from twdecomp.graph_core import Graph, GraphError, complete_graph, cycle_graph, disjoint_union, grid_graph
from twdecomp.treewidth import TreeDecomposition, TreewidthSizeError, exact_treewidth, tw_upper_bound

STRATEGIES = ("thomassen", "divide-conquer")


def triangles_on_a_path() -> Graph:
    return Graph(range(8), [(0, 1), (1, 2), (0, 2), (2, 3), (3, 4), (4, 5), (5, 6), (6, 7), (5, 7)])


def theta() -> Graph:
    return Graph(range(5), [(0, 2), (2, 1), (0, 3), (3, 1), (0, 4), (4, 1)])


@pytest.mark.parametrize("strategy", STRATEGIES)
def test_forest_gets_empty_cover(strategy):
    g = random_tree(random.Random(1), 9)
    for k in (1, 2, 4):
        out = ep_cycles(g, k, strategy)
        assert out.kind == "cover" and out.cover == frozenset() and out.verify(g, CycleFamily())


@pytest.mark.parametrize("strategy", STRATEGIES)
def test_triangle_packs_one(strategy):
    out = ep_cycles(complete_graph(3), 1, strategy)
    assert out.kind == "packing" and [sorted(c) for c in out.packing] == [[0, 1, 2]]


@pytest.mark.parametrize("strategy", STRATEGIES)
def test_two_triangles(strategy):
    g = triangles_on_a_path()
    assert oracle_max_cycle_packing(g) == 2
    out = ep_cycles(g, 2, strategy)
    assert out.kind == "packing" and len(out.packing) == 2 and out.verify(g, CycleFamily())
    out = ep_cycles(g, 3, strategy)
    assert out.kind == "cover" and out.verify(g, CycleFamily())


def test_thomassen_cover_bound_is_recorded():
    g = triangles_on_a_path()
    out = ep_cycles(g, 3)
    w = out.bound_used["w"]
    assert out.bound_used["value"] == 3 * (w + 1) and len(out.cover) <= 3 * (w + 1)


def test_divide_bound_arithmetic():
    assert divide_bound(0, 3) == 0
    assert divide_bound(1, 2) == pytest.approx(10 * 1.5 * 1)
    assert divide_bound(3, 1, EPConfig(beta=4)) == pytest.approx(4 * 3 * 2)


def test_mod_cycle_examples():
    out = ep_mod_cycles(cycle_graph(6), 1, 3)
    assert out.kind == "packing" and len(out.packing[0]) == 6
    out = ep_mod_cycles(cycle_graph(5), 1, 3)
    assert out.kind == "cover" and out.verify(cycle_graph(5), CycleFamily(3))
    assert oracle_max_cycle_packing(cycle_graph(5).remove_vertices(out.cover), 3) == 0
    c4s = disjoint_union(cycle_graph(4), cycle_graph(4))
    out = ep_mod_cycles(c4s, 2, 2)
    assert out.kind == "packing" and sorted(map(sorted, out.packing)) == [[0, 1, 2, 3], [4, 5, 6, 7]]


def test_bad_arguments():
    with pytest.raises(ValueError):
        ep_cycles(complete_graph(3), 0)
    with pytest.raises(ValueError):
        ep_cycles(complete_graph(3), 1, "greedy")
    with pytest.raises(ValueError):
        ep_mod_cycles(complete_graph(3), 1, 1)


def test_parallel_edges_are_not_cycles():
    g = Graph([0, 1], [(0, 1), (0, 1)])
    assert ep_cycles(g, 1).kind == "cover"
    assert cycle_packing_dp(exact_treewidth(g)[1], g) == 0


def test_family_membership():
    adj = {0: {1, 2}, 1: {0, 2}, 2: {0, 1}}
    fam = CycleFamily()
    assert fam.is_member(adj, (0, 1, 2)) and not fam.is_member(adj, (0, 1))
    assert not CycleFamily(2).is_member(adj, (0, 1, 2))
    assert CycleFamily(4).name == "cycles-0-mod-4" and CycleFamily(4).min_length == 4


def test_cycles_through_lists_each_once():
    g = complete_graph(4)
    adj = {v: set(g.neighbors(v)) for v in g.vertices}
    cyc = list(CycleFamily().cycles_through(adj, 0, frozenset(g.vertices)))
    # through a K4 vertex: three triangles and three 4-cycles
    assert len(cyc) == 6 and len({frozenset(c) for c in cyc if len(c) == 3}) == 3


def test_tampered_outcomes_fail():
    g = triangles_on_a_path()
    fam = CycleFamily()
    out = ep_cycles(g, 2)
    assert not EPOutcome("packing", 2, fam.name, "x", packing=[out.packing[0], out.packing[0]]).verify(g, fam)
    assert not EPOutcome("cover", 2, fam.name, "x", cover=frozenset({0})).verify(g, fam)
    assert not EPOutcome("packing", 3, fam.name, "x", packing=out.packing).verify(g, fam)


def test_dp_examples():
    tri = complete_graph(3)
    assert cycle_packing_dp(exact_treewidth(tri)[1], tri) == 1
    assert cycle_packing_dp(exact_treewidth(theta())[1], theta()) == 1
    g = grid_graph(3, 4)
    assert cycle_packing_dp(exact_treewidth(g)[1], g) == oracle_max_cycle_packing(g) == 2


def test_dp_rejects_bad_input():
    tri = complete_graph(3)
    with pytest.raises(GraphError):
        cycle_packing_dp(TreeDecomposition({0: frozenset({0, 1})}, []), tri)
    k10 = complete_graph(10)
    with pytest.raises(TreewidthSizeError):
        cycle_packing_dp(exact_treewidth(k10)[1], k10)


def test_dp_matches_brute_force_corpus():
    rng = random.Random(31)
    for _ in range(120):
        g = random_graph(rng, rng.randint(1, 9), rng.uniform(0.1, 0.9))
        want = oracle_max_cycle_packing(g)
        assert cycle_packing_dp(exact_treewidth(g)[1], g) == want
        # any valid decomposition gives the same value
        assert cycle_packing_dp(tw_upper_bound(g, "min-fill")[1], g) == want


@settings(max_examples=40)
@given(st.integers(0, 10**6), st.integers(1, 3))
def test_ep_outcomes_always_verify(seed, k):
    rng = random.Random(seed)
    g = random_graph(rng, rng.randint(2, 8), rng.uniform(0.2, 0.8))
    best = oracle_max_cycle_packing(g)
    for strategy in STRATEGIES:
        out = ep_cycles(g, k, strategy)
        assert out.verify(g, CycleFamily())
        assert (out.kind == "packing") == (best >= k)
        if out.kind == "cover":
            w = out.bound_used["w"]
            if strategy == "thomassen":
                assert len(out.cover) <= k * (w + 1)
            else:
                assert len(out.cover) <= divide_bound(best, w) + 1e-9


@settings(max_examples=25)
@given(st.integers(0, 10**6), st.sampled_from([2, 3, 4]))
def test_mod_outcomes_always_verify(seed, m):
    rng = random.Random(seed)
    g = random_graph(rng, rng.randint(3, 8), rng.uniform(0.3, 0.8))
    best = oracle_max_cycle_packing(g, m)
    fam = CycleFamily(m)
    assert len(max_packing(g, fam)) == best
    for strategy in STRATEGIES:
        out = ep_mod_cycles(g, 1, m, strategy)
        assert out.verify(g, fam) and (out.kind == "packing") == (best >= 1)


def test_fpt_examples():
    tri = complete_graph(3)
    three = disjoint_union(tri, tri, tri)
    assert fpt_decide(three, 3) and not fpt_decide(three, 2)
    assert fpt_decide(random_tree(random.Random(2), 8), 0)
    g = grid_graph(4)
    want = oracle_max_cycle_packing(g)
    for k in (1, 2, 3, 4):
        assert fpt_decide(g, k) == (want <= k)


def test_fpt_threshold():
    assert fpt_threshold(0, 2) == 4 and fpt_threshold(3, 2) == 16 and fpt_threshold(0, 0) == 1


def test_fpt_certificate_route():
    # K7 has treewidth 6 > k' = 4 when k = 0, so the certificate route answers
    g = complete_graph(7)
    res = fpt_run(g, 0)
    assert res.answer is False and res.detail["certificate"]
    assert res.route == "decomposition" or res.value == 2


def test_fpt_with_forced_small_threshold():
    g = disjoint_union(complete_graph(4), complete_graph(4), cycle_graph(5))
    for k in range(4):
        assert fpt_decide(g, k, k_prime=1) == (3 <= k)


def test_plugin_without_component_sum():
    plugin = ParameterPlugin("cycle-packing-whole", 2, cycle_packing_dp, is_sum_over_components=False)
    g = disjoint_union(complete_graph(3), cycle_graph(4))
    assert fpt_run(g, 1, plugin).value == 2 == fpt_run(g, 1, CYCLE_PACKING).value

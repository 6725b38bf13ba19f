from __future__ import annotations

import itertools
import random
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from helpers import (crossing, oracle_conductance, oracle_sparsity, random_connected, random_graph,
                     two_triangles_bridge)
from twdecomp.cuts_flows import (CutError, SolverConfig, balanced_cut, cut_stats, make_cut, max_flow,
                                 min_conductance_cut, min_cut_value, route_demands_in_cluster,
                                 sparsest_cut)
from twdecomp.graph_core import Graph, GraphError, complete_graph, cycle_graph, disjoint_union, grid_graph, path_graph

EXACT = SolverConfig(mode="exact")


def test_sparsest_examples():
    g = two_triangles_bridge()
    assert sparsest_cut(g, g.vertices, EXACT).sparsity == Fraction(1, 3)
    e = path_graph(2)
    assert sparsest_cut(e, e.vertices).sparsity == 1
    k4 = complete_graph(4)
    # a 1|3 split gives 3/1, a 2|2 split 4/2
    assert sparsest_cut(k4, k4.vertices, EXACT).sparsity == 2


def test_sparsest_too_small():
    with pytest.raises(CutError):
        sparsest_cut(Graph([0], []), [0])


def test_conductance_examples():
    assert min_conductance_cut(two_triangles_bridge(), EXACT).conductance == Fraction(1, 3)
    two = disjoint_union(complete_graph(3), complete_graph(3))
    assert min_conductance_cut(two, EXACT).conductance == 0
    assert min_conductance_cut(cycle_graph(6), EXACT).conductance == 1


def test_conductance_degenerate():
    with pytest.raises(CutError):
        min_conductance_cut(path_graph(2))


def test_balanced_examples():
    k4 = complete_graph(4)
    # gamma = 1/4 of four marks admits a 1|3 split, crossing 3
    assert balanced_cut(k4, k4.vertices, k4.vertices, EXACT).crossing == 3
    assert balanced_cut(k4, k4.vertices, k4.vertices, EXACT.with_(gamma_balance=Fraction(1, 2))).crossing == 4
    g = two_triangles_bridge()
    assert balanced_cut(g, g.vertices, g.vertices, EXACT).crossing == 1
    p8 = path_graph(8)
    c = balanced_cut(p8, p8.vertices, p8.vertices, EXACT)
    assert c.crossing == 1 and min(len(c.side_a), len(c.side_b)) >= 2


def test_balanced_infeasible():
    with pytest.raises(CutError):
        balanced_cut(path_graph(3), {0, 1, 2}, {0}, EXACT)


def test_max_flow_examples():
    assert max_flow(path_graph(3), {0}, {2}).value == 1
    assert max_flow(complete_graph(4), {0, 1}, {2, 3}, "vertex").value == 2
    res = max_flow(grid_graph(3), {0}, {8})
    assert res.value == 2 and len(res.paths) == 2


def test_max_flow_paths_are_disjoint_in_vertex_mode():
    g = grid_graph(4)
    res = max_flow(g, {0, 4, 8}, {3, 7, 11}, "vertex")
    assert res.value == 3
    used = [v for p in res.paths for v in p]
    assert len(used) == len(set(used))
    for p in res.paths:
        assert all(g.has_edge(a, b) for a, b in zip(p, p[1:]))


def test_route_single_edge_cluster():
    g = path_graph(4)
    rep = route_demands_in_cluster(g, {1, 2}, {(0, 1): 1.0})
    assert rep.feasible and rep.congestion == pytest.approx(1.0)


def test_route_clique_all_pairs():
    es = list(complete_graph(4).edges) + [(i, i + 4) for i in range(4)]
    g = Graph(range(8), es)
    k = 4
    demands = {(i, j): 1 / (k - 1) for i in range(k) for j in range(i + 1, k)}
    rep = route_demands_in_cluster(g, range(4), demands, cap=1.0)
    assert rep.feasible and rep.congestion <= 1 + 1e-9


def test_cut_stats_matches_make_cut():
    g = grid_graph(3)
    c = make_cut(g, {0, 1, 3, 4})
    assert cut_stats(g, {0, 1, 3, 4}) == (c.crossing, 4, 4)


def test_unknown_capacity_mode():
    with pytest.raises(GraphError):
        max_flow(path_graph(3), {0}, {2}, "bogus")


# ---------------------------------------------------------------------------
# oracle agreement


def test_exact_sparsity_matches_enumeration():
    rng = random.Random(11)
    for _ in range(80):
        n = rng.randint(2, 10)
        g = random_graph(rng, n, rng.uniform(0.2, 0.8))
        ts = frozenset(v for v in g.vertices if rng.random() < 0.7)
        if len(ts) < 2:
            ts = frozenset(g.sorted_vertices()[:2])
        want = oracle_sparsity(g, ts)
        got = sparsest_cut(g, ts, SolverConfig(mode="auto"))
        assert got.exact and got.sparsity == want


def test_terminal_split_route_matches_enumeration():
    # exact_limit below n forces terminal-split enumeration plus min cuts
    rng = random.Random(5)
    cfg = SolverConfig(mode="auto", exact_limit=4)
    for _ in range(40):
        g = random_connected(rng, rng.randint(6, 10), 0.4)
        ts = frozenset(rng.sample(g.sorted_vertices(), rng.randint(2, 6)))
        got = sparsest_cut(g, ts, cfg)
        assert got.exact and got.sparsity == oracle_sparsity(g, ts)


def test_exact_conductance_matches_enumeration():
    rng = random.Random(12)
    for _ in range(60):
        g = random_graph(rng, rng.randint(3, 10), rng.uniform(0.3, 0.8))
        want = oracle_conductance(g)
        if want is None:
            with pytest.raises(CutError):
                min_conductance_cut(g, EXACT)
            continue
        assert min_conductance_cut(g, EXACT).conductance == want


def _oracle_min_cut(g, a, b):
    rest = sorted(g.vertices - a - b)
    best = None
    for r in range(len(rest) + 1):
        for comb in itertools.combinations(rest, r):
            val = crossing(g, set(a) | set(comb))
            best = val if best is None else min(best, val)
    return best


def test_flow_equals_enumerated_min_cut():
    rng = random.Random(13)
    for _ in range(60):
        g = random_graph(rng, rng.randint(3, 10), rng.uniform(0.2, 0.7))
        vs = g.sorted_vertices()
        rng.shuffle(vs)
        a, b = set(vs[:2]), set(vs[2:4])
        if not b:
            continue
        assert max_flow(g, a, b).value == _oracle_min_cut(g, a, b) == min_cut_value(g, a, b)[0]


@given(st.integers(0, 10_000))
def test_returned_cut_fields_recompute(seed):
    rng = random.Random(seed)
    g = random_connected(rng, rng.randint(3, 9), 0.5)
    ts = g.vertices
    for cut in (sparsest_cut(g, ts, SolverConfig(mode="heuristic", seed=seed)), sparsest_cut(g, ts)):
        again = make_cut(g, cut.side_a, ts)
        assert cut.side_a | cut.side_b == g.vertices and not cut.side_a & cut.side_b
        assert (again.crossing, again.sparsity) == (cut.crossing, cut.sparsity)


@given(st.integers(0, 10_000))
def test_heuristic_balanced_cut_is_feasible(seed):
    rng = random.Random(seed)
    g = random_connected(rng, rng.randint(6, 12), 0.4)
    cfg = SolverConfig(mode="heuristic", seed=seed)
    c = balanced_cut(g, g.vertices, g.vertices, cfg)
    need = Fraction(1, 4) * g.n()
    assert min(len(c.side_a), len(c.side_b)) >= need

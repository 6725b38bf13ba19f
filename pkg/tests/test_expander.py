from __future__ import annotations

import random
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from helpers import oracle_edge_expansion, random_connected
from twdecomp.expander import (EmbeddingPaths, ExpanderError, ProtocolError, RoutingError,
                               build_small_expander, cut_matching_game, edge_coloring_matchings,
                               measure_expansion, reduce_degree, route_matchings_short_paths,
                               routing_caps, split_vertices)
from twdecomp.graph_core import Graph, complete_graph, cycle_graph, disjoint_union


def test_single_round_on_two_vertices():
    w = cut_matching_game(2, 1)
    assert w.graph.edges == ((0, 1),)
    assert w.expansion == 1 and w.verification_mode == "exhaustive"
    assert w.replay()


def test_four_rounds_give_four_regular():
    w = cut_matching_game(4, 4, seed=3)
    assert all(w.graph.degree(v) == 4 for v in range(4))
    assert len(w.matchings) == 4 and w.replay()


def test_zero_rounds_is_edgeless():
    w = cut_matching_game(6, 0)
    assert w.graph.m() == 0 and w.expansion == 0


def test_bad_sizes_rejected():
    with pytest.raises(ValueError):
        cut_matching_game(5, 2)
    with pytest.raises(ValueError):
        cut_matching_game(4, -1)


def test_bad_oracle_is_a_protocol_error():
    with pytest.raises(ProtocolError):
        cut_matching_game(6, 1, matching_oracle=lambda ys, zs: [(ys[0], ys[1])])


def test_cmg_is_seed_deterministic():
    a = cut_matching_game(16, 8, seed=11)
    b = cut_matching_game(16, 8, seed=11)
    assert a.matchings == b.matchings and a.expansion == b.expansion


def test_cmg_sixteen_usually_expands():
    good = sum(cut_matching_game(16, 16, seed=s).expansion >= Fraction(1, 2) for s in range(10))
    assert good >= 9


def test_measure_matches_oracle():
    rng = random.Random(5)
    for _ in range(30):
        g = random_connected(rng, rng.randint(2, 10), 0.4)
        val, mode = measure_expansion(g)
        assert mode == "exhaustive" and val == oracle_edge_expansion(g)


def test_spectral_bound_is_below_exhaustive():
    rng = random.Random(6)
    for _ in range(10):
        g = random_connected(rng, rng.randint(6, 12), 0.4)
        lo, mode = measure_expansion(g, exhaustive=False)
        assert mode == "spectral" and lo <= measure_expansion(g)[0]


def test_small_expander_examples():
    w = build_small_expander(4)
    assert w.graph.m() == 6 and w.expansion == 2
    w = build_small_expander(10, target_alpha=Fraction(1, 5))
    assert w.verification_mode == "exhaustive" and w.expansion >= Fraction(1, 5)
    assert all(w.graph.degree(v) == 3 for v in range(10))
    assert w.replay()


def test_large_expander_is_spectral():
    w = build_small_expander(200)
    assert w.verification_mode == "spectral" and w.expansion >= Fraction(1, 10)
    assert w.graph.max_degree() == 3 and w.replay()


def test_odd_expander_has_one_degree_two_vertex():
    w = build_small_expander(7)
    degs = sorted(w.graph.degree(v) for v in range(7))
    assert degs == [2] + [3] * 6


def test_unreachable_target_raises():
    with pytest.raises(ExpanderError):
        build_small_expander(8, target_alpha=5, retries=5)


def test_split_star():
    star = Graph(range(7), [(0, i) for i in range(1, 7)])
    g2, sm = split_vertices(star)
    assert g2.n() == 12 and len(sm.clusters[0]) == 6
    assert g2.max_degree() <= 4
    # contracting each cluster gives back the star
    back = sorted(tuple(sorted((sm.origin[a], sm.origin[b]))) for a, b in sm.edge_ends.values())
    assert back == sorted(star.edges)


def test_split_leaves_low_degree_alone():
    g2, sm = split_vertices(cycle_graph(4))
    assert g2 == cycle_graph(4)
    assert all(sm.clusters[v] == [v] for v in range(4))


@given(st.integers(0, 10**6))
def test_split_degree_bound(seed):
    rng = random.Random(seed)
    g = random_connected(rng, rng.randint(3, 9), 0.6)
    g2, sm = split_vertices(g, seed=seed)
    assert g2.max_degree() <= 4
    assert g2.m() == g.m() + sum(len(c) * 3 // 2 for c in sm.clusters.values() if len(c) > 1)


def test_route_on_k4_is_direct():
    emb = route_matchings_short_paths(complete_graph(4), [[(0, 1), (2, 3)], [(0, 2), (1, 3)]], 2)
    assert emb.max_length == 1 and emb.edge_congestion == 1 and emb.recompute_ok()


def test_route_antipodal_c6():
    emb = route_matchings_short_paths(cycle_graph(6), [[(0, 3), (1, 4), (2, 5)]], Fraction(1, 3))
    assert emb.max_length == 3 and emb.edge_congestion <= 3 and emb.recompute_ok()


def test_route_cmg_matchings_within_caps():
    host = build_small_expander(16, target_alpha=Fraction(1, 5), seed=1)
    w = cut_matching_game(16, 5, seed=2)
    emb = route_matchings_short_paths(host.graph, w.matchings, host.expansion)
    lcap, ccap = routing_caps(16, host.graph.max_degree(), host.expansion, 4.0, 4.0)
    assert emb.max_length <= lcap and emb.edge_congestion <= ccap
    for (a, b), p in emb.paths.items():
        assert p[0] == a and p[-1] == b
        assert all(host.graph.has_edge(x, y) for x, y in zip(p, p[1:]))


def test_route_fails_when_disconnected():
    g = Graph(range(4), [(0, 1), (2, 3)])
    with pytest.raises(RoutingError):
        route_matchings_short_paths(g, [[(0, 2)]], 1)


def test_tampered_paths_fail_recompute():
    emb = route_matchings_short_paths(cycle_graph(6), [[(0, 3)]], Fraction(1, 3))
    bad = EmbeddingPaths(emb.paths, emb.max_length - 1, emb.edge_congestion, emb.vertex_congestion)
    assert not bad.recompute_ok()


def test_edge_colouring_is_proper():
    rng = random.Random(8)
    for _ in range(20):
        g = random_connected(rng, rng.randint(2, 10), 0.5)
        classes = edge_coloring_matchings(g)
        assert sorted(e for c in classes for e in c) == sorted(g.edges)
        assert len(classes) <= max(1, 2 * g.max_degree() - 1)
        for c in classes:
            ends = [v for e in c for v in e]
            assert len(ends) == len(set(ends))


def test_reduce_degree_on_k8():
    g = complete_graph(8)
    red = reduce_degree(g, range(8), 1, rounds=3, seed=1)
    assert red.max_degree <= 2 * 3 * 1 == red.degree_cap
    assert red.graph.max_degree() == red.max_degree
    assert all(g.has_edge(a, b) for a, b in red.graph.edges)
    assert len(red.witness.matchings) == 3


def test_reduce_degree_zero_rounds():
    red = reduce_degree(complete_graph(8), range(8), 1, rounds=0)
    assert red.graph.m() == 0 and red.max_degree == 0


def test_reduce_degree_paths_respect_vertex_cap():
    g = disjoint_union(complete_graph(6), complete_graph(6))
    g = Graph(g.vertices, list(g.edges) + [(0, 6), (1, 7), (2, 8)])
    red = reduce_degree(g, [3, 4, 5, 9, 10, 11], Fraction(1, 2), rounds=2, seed=4)
    for paths in red.round_paths:
        load = {}
        for p in paths:
            for v in set(p):
                load[v] = load.get(v, 0) + 1
        assert max(load.values()) <= red.vertex_cap == 2


def test_reduce_degree_overstated_alpha():
    # a cut vertex cannot carry several paths at vertex congestion 1
    g = Graph(range(8), [(0, 1), (1, 2), (0, 2), (2, 3), (3, 4), (4, 5), (5, 6), (4, 6), (6, 7), (5, 7)])
    with pytest.raises(ExpanderError):
        reduce_degree(g, [0, 1, 2, 5, 6, 7], 1, rounds=4, seed=0)

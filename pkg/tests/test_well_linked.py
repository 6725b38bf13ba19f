from __future__ import annotations

import itertools
import random
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from helpers import oracle_sparsity, random_connected, random_graph, two_triangles_bridge
from twdecomp.cuts_flows import SolverConfig
from twdecomp.graph_core import Graph, complete_graph, count_out, cycle_graph, grid_graph, path_graph
from twdecomp.treewidth import exact_treewidth, node_well_linked_bounds
from twdecomp.well_linked import (PreconditionError, WellLinkedCertificate, check_alpha_good,
                                  check_alpha_good_direct, check_alpha_well_linked, exact_wl_alpha,
                                  find_well_linked_set, verify_node_well_linked, well_linked_decomposition,
                                  wl_boundary_bound)


def dumbbell_cluster() -> Graph:
    """Two triangles joined by a bridge, two boundary edges hanging off each triangle."""
    es = [(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5), (2, 3), (0, 6), (1, 7), (4, 8), (5, 9)]
    return Graph(range(10), es)


def test_well_linked_examples():
    k4 = complete_graph(4)
    assert check_alpha_well_linked(k4, k4.vertices, 1)
    assert check_alpha_well_linked(path_graph(5), {0, 4}, 1)
    g = two_triangles_bridge()
    res = check_alpha_well_linked(g, g.vertices, Fraction(1, 2))
    assert not res.passed and res.cut.crossing == 1 and res.exact


def test_good_examples():
    g = dumbbell_cluster()
    assert check_alpha_good(path_graph(3), {0, 1}, 1)
    star = Graph(range(5), [(0, i) for i in range(1, 5)])
    assert check_alpha_good(star, {0}, 1)
    res = check_alpha_good(g, range(6), 1)
    assert not res.passed and res.cut.crossing == 1


def test_decomposition_of_good_set_is_itself():
    g = complete_graph(6)
    dec = well_linked_decomposition(g, {0, 1, 2}, Fraction(1, 30))
    assert dec.parts == [frozenset({0, 1, 2})] and dec.verified == [True]


def test_dumbbell_decomposition():
    g = dumbbell_cluster()
    s = set(range(6))
    # the boundary-sum guarantee needs alpha < 1/(8·log2 4) = 1/16
    with pytest.raises(PreconditionError):
        well_linked_decomposition(g, s, Fraction(1, 8))
    # the bridge cut has sparsity 1/2, so alpha 1/8 keeps the cluster whole
    dec = well_linked_decomposition(g, s, Fraction(1, 8), strict=False)
    assert dec.parts == [frozenset(s)] and dec.boundary_sum == 4
    dec = well_linked_decomposition(g, s, 1, strict=False)
    assert dec.parts == [frozenset({0, 1, 2}), frozenset({3, 4, 5})]
    assert dec.boundary_sum == 6 and dec.verified == [True, True]


def test_decomposition_without_boundary_gives_components():
    g = Graph(range(6), [(0, 1), (1, 2), (3, 4)])
    dec = well_linked_decomposition(g, g.vertices, Fraction(1, 4))
    assert dec.parts == [frozenset({0, 1, 2}), frozenset({3, 4}), frozenset({5})]
    assert dec.boundary_sum == 0 and dec.k_prime == 0


def test_find_well_linked_set_examples():
    cert = find_well_linked_set(complete_graph(6))
    assert len(cert.terminal_set) >= 3 and cert.alpha == 1 and cert.replay(complete_graph(6))
    p10 = path_graph(10)
    cert = find_well_linked_set(p10)
    assert cert.alpha == 1 and len(cert.terminal_set) <= 3
    assert oracle_sparsity(p10, cert.terminal_set) >= 1
    g = grid_graph(5)
    cert = find_well_linked_set(g)
    assert len(cert.terminal_set) >= 5 and cert.alpha >= Fraction(1, 4) and cert.mode == "exhaustive"
    # brute force over all 2^15 cuts is affordable on the 4x4 grid
    g = grid_graph(4)
    cert = find_well_linked_set(g)
    assert min(1, oracle_sparsity(g, cert.terminal_set)) == cert.alpha


def test_find_well_linked_set_degenerate():
    cert = find_well_linked_set(path_graph(2))
    assert cert.alpha == 1 and cert.witness["reason"] == "degenerate"


def test_node_well_linked_examples():
    assert verify_node_well_linked(path_graph(2), {0, 1})
    # overlapping halves {0,1,2} and {0,2,3} would need three disjoint paths
    # through a graph where 0 and 2 separate 1 from 3
    c4 = verify_node_well_linked(cycle_graph(4), range(4))
    assert not c4.passed and c4.value == Fraction(2, 3)
    assert verify_node_well_linked(cycle_graph(4), {0, 1, 2})
    star = Graph(range(5), [(0, i) for i in range(1, 5)])
    res = verify_node_well_linked(star, range(1, 5))
    assert not res.passed and res.value == Fraction(1, 2)


def test_certificate_json_round_trip():
    g = grid_graph(4)
    cert = find_well_linked_set(g)
    back = WellLinkedCertificate.from_json(cert.to_json())
    assert back == cert and back.replay(g)
    tampered = WellLinkedCertificate(cert.terminal_set, cert.alpha * 2 if cert.alpha <= Fraction(1, 2) else 1,
                                     cert.kind, cert.mode, cert.witness, cert.host)
    if tampered.alpha > cert.alpha:
        assert not tampered.replay(g)


def test_sampled_certificate_replays():
    rng = random.Random(4)
    g = random_connected(rng, 40, 0.15)
    cert = find_well_linked_set(g, shrink_to_exact=False)
    assert cert.mode in ("sampled", "exhaustive")
    assert cert.replay(g)


# ---------------------------------------------------------------------------
# properties


def test_good_equals_direct_definition():
    rng = random.Random(21)
    for _ in range(120):
        g = random_graph(rng, rng.randint(3, 10), rng.uniform(0.25, 0.7))
        s = {v for v in g.vertices if rng.random() < 0.6} or {0}
        if len(s) > 8:
            continue
        alpha = rng.choice([Fraction(1, 4), Fraction(1, 2), Fraction(2, 3), 1])
        assert check_alpha_good(g, s, alpha).passed == check_alpha_good_direct(g, s, alpha).passed


@given(st.integers(0, 10_000))
def test_boundary_sum_inequality(seed):
    rng = random.Random(seed)
    g = random_graph(rng, rng.randint(6, 14), rng.uniform(0.2, 0.6))
    s = {v for v in g.vertices if rng.random() < 0.6}
    if not s:
        return
    k = count_out(g, s)
    alpha = Fraction(1, 8 * max(2, k).bit_length() + 1)
    dec = well_linked_decomposition(g, s, alpha, strict=False)
    assert sorted(v for p in dec.parts for v in p) == sorted(s)
    if dec.precondition_ok:
        assert dec.boundary_sum <= wl_boundary_bound(k, alpha, 1) + 1e-9
    assert all(v is not False for v in dec.verified)


def test_node_well_linked_implies_treewidth():
    rng = random.Random(22)
    for _ in range(40):
        g = random_graph(rng, rng.randint(3, 8), rng.uniform(0.3, 0.8))
        tw = exact_treewidth(g)[0]
        for x in itertools.combinations(g.sorted_vertices(), min(4, g.n())):
            if verify_node_well_linked(g, x):
                assert node_well_linked_bounds(len(x))[0] <= tw
                break


def test_node_well_linked_set_can_exceed_treewidth():
    # four pairwise-linkable vertices in a graph of treewidth 2
    g = Graph(range(7), [(0, 3), (0, 5), (0, 6), (1, 2), (1, 4), (2, 4), (2, 6), (3, 4), (3, 6)])
    assert verify_node_well_linked(g, (0, 1, 2, 6))
    assert exact_treewidth(g)[0] == 2


def test_found_alpha_matches_independent_oracle():
    rng = random.Random(23)
    for _ in range(25):
        g = random_connected(rng, rng.randint(4, 12), 0.35)
        cert = find_well_linked_set(g)
        assert cert.mode == "exhaustive"
        want = oracle_sparsity(g, cert.terminal_set)
        assert cert.alpha == (1 if want is None else min(1, want))
        assert exact_wl_alpha(g, cert.terminal_set, SolverConfig()) == cert.alpha

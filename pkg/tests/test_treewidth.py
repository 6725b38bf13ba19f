from __future__ import annotations

import itertools
import random
from fractions import Fraction

import networkx as nx
import pytest
from hypothesis import given
from hypothesis import strategies as st

from helpers import oracle_treewidth, random_graph, random_tree
from twdecomp.graph_core import Graph, complete_graph, cycle_graph, disjoint_union, from_networkx, grid_graph
from twdecomp.treewidth import (TreeDecomposition, TreewidthSizeError, TwCertificate, decompose_or_certify,
                                decomposition_from_order, exact_treewidth, minor_lower_bound,
                                node_well_linked_bounds, replay_minor_bound, treewidth_at_least,
                                treewidth_branch_and_bound, tw_lower_bound_from_well_linked, tw_upper_bound)
from twdecomp.well_linked import verify_node_well_linked


def test_exact_examples():
    assert exact_treewidth(grid_graph(3))[0] == 3
    assert exact_treewidth(complete_graph(5))[0] == 4
    petersen = from_networkx(nx.petersen_graph())
    tw, td = exact_treewidth(petersen)
    assert tw == treewidth_branch_and_bound(petersen) == 4
    assert td.validate(petersen) is None and td.width == 4


def test_exact_size_limit():
    with pytest.raises(TreewidthSizeError):
        exact_treewidth(grid_graph(5))


def test_upper_bound_examples():
    rng = random.Random(1)
    tree = random_tree(rng, 12)
    assert tw_upper_bound(tree)[0] == 1
    assert tw_upper_bound(complete_graph(6))[0] == 5
    ub, td = tw_upper_bound(grid_graph(4))
    assert ub >= exact_treewidth(grid_graph(4))[0] == 4
    assert td.validate(grid_graph(4)) is None


@pytest.mark.parametrize("t, alpha, delta, want", [(24, 1, 4, 1), (9, Fraction(1, 3), 3, 0), (90, Fraction(1, 2), 3, 4)])
def test_well_linked_bound_formula(t, alpha, delta, want):
    assert tw_lower_bound_from_well_linked(t, alpha, delta) == want


def test_decompose_or_certify_examples():
    rng = random.Random(2)
    res = decompose_or_certify(random_tree(rng, 10), 2)
    assert isinstance(res, TreeDecomposition) and res.width == 1
    res = decompose_or_certify(complete_graph(5), 2)
    assert isinstance(res, TwCertificate) and res.bound > 2
    g = grid_graph(5)
    res = decompose_or_certify(g, 3)
    assert isinstance(res, TwCertificate) and res.bound > 3
    assert res.kind == "minor" and replay_minor_bound(g, res.detail["contractions"], res.bound)


def test_decompose_or_certify_width_cap():
    g = grid_graph(6)
    res = decompose_or_certify(g, 2)
    assert isinstance(res, TwCertificate) or res.width <= 8


def test_node_well_linked_bounds():
    # a node-well-linked triangle has tw 2, so the lower end cannot be x
    assert node_well_linked_bounds(3) == (0, 12)
    assert node_well_linked_bounds(8) == (1, 32)
    assert node_well_linked_bounds(9) == (2, 36)
    assert node_well_linked_bounds(0) == (0, 0)


def test_node_well_linked_bounds_on_c5():
    g = cycle_graph(5)
    best = 0
    for r in range(1, 6):
        for x in itertools.combinations(range(5), r):
            if verify_node_well_linked(g, x):
                best = max(best, r)
    lo, hi = node_well_linked_bounds(best)
    assert lo <= exact_treewidth(g)[0] == 2 <= hi


def test_treewidth_at_least_ignores_parallel_edges():
    g = Graph([0, 1], [(0, 1), (0, 1)])
    assert treewidth_at_least(g, 2) == (False, "cycle")
    assert treewidth_at_least(cycle_graph(4), 2)[0]


def test_minor_bound_replay_with_isolated_vertex():
    g = disjoint_union(complete_graph(4), Graph([0], []))
    lb, seq = minor_lower_bound(g)
    assert lb == 3 and replay_minor_bound(g, seq, lb)


# ---------------------------------------------------------------------------
# corpora


def test_exact_matches_branch_and_bound_corpus():
    rng = random.Random(7)
    for _ in range(500):
        g = random_graph(rng, rng.randint(1, 10), rng.uniform(0.15, 0.85))
        assert exact_treewidth(g)[0] == treewidth_branch_and_bound(g)


def test_exact_matches_order_enumeration():
    rng = random.Random(8)
    for _ in range(40):
        g = random_graph(rng, rng.randint(2, 7), rng.uniform(0.2, 0.9))
        assert exact_treewidth(g)[0] == max(oracle_treewidth(g), 0 if g.n() else -1)


@given(st.integers(0, 10_000))
def test_decompositions_validate(seed):
    rng = random.Random(seed)
    g = random_graph(rng, rng.randint(1, 12), rng.uniform(0.1, 0.7))
    for td in (exact_treewidth(g)[1], tw_upper_bound(g)[1], tw_upper_bound(g, "min-degree")[1]):
        assert td.validate(g) is None
    order = g.sorted_vertices()
    rng.shuffle(order)
    assert decomposition_from_order(g, order).validate(g) is None


@given(st.integers(0, 10_000))
def test_bounds_bracket_exact(seed):
    rng = random.Random(seed)
    g = random_graph(rng, rng.randint(2, 11), rng.uniform(0.2, 0.8))
    tw = exact_treewidth(g)[0]
    lb, seq = minor_lower_bound(g)
    assert lb <= tw <= tw_upper_bound(g)[0]
    assert replay_minor_bound(g, seq, lb)
    for r in range(0, tw + 2):
        holds, _ = treewidth_at_least(g, r)
        assert holds == (tw >= r)


@given(st.integers(0, 10_000), st.integers(1, 4))
def test_decompose_or_certify_replays(seed, w):
    rng = random.Random(seed)
    g = random_graph(rng, rng.randint(2, 12), rng.uniform(0.2, 0.9))
    tw = exact_treewidth(g)[0]
    res = decompose_or_certify(g, w)
    if isinstance(res, TreeDecomposition):
        assert res.validate(g) is None and res.width <= 4 * w
    else:
        assert res.bound > w and tw >= res.bound


def test_invalid_decomposition_is_reported():
    g = cycle_graph(4)
    td = TreeDecomposition({0: frozenset({0, 1, 2}), 1: frozenset({2, 3})}, [(0, 1)])
    assert "not covered" in td.validate(g)
    assert td.to_pace(g).startswith("s td 2 3 4")

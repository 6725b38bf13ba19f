from __future__ import annotations

import itertools
import random
from fractions import Fraction

import networkx as nx
import numpy as np
from twdecomp.graph_core import Graph

def random_graph(rng: random.Random, n: int, p: float) -> Graph:
    return Graph(range(n), [(u, v) for u in range(n) for v in range(u + 1, n) if rng.random() < p])


def random_connected(rng: random.Random, n: int, p: float) -> Graph:
    while True:
        g = random_graph(rng, n, p)
        if n <= 1 or g.is_connected():
            return g


def random_tree(rng: random.Random, n: int) -> Graph:
    return Graph(range(n), [(rng.randrange(i), i) for i in range(1, n)])


def to_nx(g: Graph) -> nx.MultiGraph:
    h = nx.MultiGraph()
    h.add_nodes_from(g.vertices)
    h.add_edges_from(g.edges)
    return h


def simple_nx(g: Graph) -> nx.Graph:
    h = nx.Graph()
    h.add_nodes_from(g.vertices)
    h.add_edges_from(g.simple_edges())
    return h


def two_triangles_bridge() -> Graph:
    return Graph(range(6), [(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5), (2, 3)])


# ---------------------------------------------------------------------------
# brute-force oracles (independent of the package's own enumeration code)


def bipartitions(vs):
    vs = sorted(vs)
    first, rest = vs[0], vs[1:]
    for r in range(len(rest) + 1):
        for comb in itertools.combinations(rest, r):
            a = {first, *comb}
            if len(a) < len(vs):
                yield a, set(vs) - a


def crossing(g: Graph, a) -> int:
    return sum(1 for u, v in g.edges if (u in a) != (v in a))


def inner(g: Graph, a) -> int:
    return sum(1 for u, v in g.edges if u in a and v in a)


def oracle_sparsity(g: Graph, ts):
    best = None
    for a, b in bipartitions(g.vertices):
        lo = min(len(a & ts), len(b & ts))
        if lo:
            val = Fraction(crossing(g, a), lo)
            best = val if best is None else min(best, val)
    return best


def oracle_conductance(g: Graph):
    """min crossing/min(inner A, inner B) over all cuts, by bitmask enumeration."""
    vs = g.sorted_vertices()
    if len(vs) < 2:
        return None
    idx = {v: i for i, v in enumerate(vs)}
    # vertex vs[-1] always sits on side B, so every cut is listed once
    masks = np.arange(1 << (len(vs) - 1), dtype=np.int64)
    cross = np.zeros(len(masks), dtype=np.int64)
    in_a = np.zeros(len(masks), dtype=np.int64)
    in_b = np.zeros(len(masks), dtype=np.int64)
    for u, v in g.edges:
        bu = (masks >> idx[u]) & 1
        bv = (masks >> idx[v]) & 1
        cross += bu ^ bv
        in_a += bu & bv
        in_b += (1 - bu) & (1 - bv)
    lo = np.minimum(in_a, in_b)
    ok = lo > 0
    if not ok.any():
        return None
    vals = [Fraction(int(c), int(d)) for c, d in zip(cross[ok], lo[ok])]
    return min(vals) if len(vals) < 5000 else _min_fraction(cross[ok], lo[ok])


def _min_fraction(num, den):
    k = int(np.argmin(num / den))
    best = Fraction(int(num[k]), int(den[k]))
    # float ties are resolved exactly
    close = np.nonzero(np.abs(num / den - float(best)) < 1e-9)[0]
    return min(Fraction(int(num[i]), int(den[i])) for i in close)


def oracle_alpha_good(g: Graph, part, alpha) -> bool:
    """Every split (A, B) of part crosses >= alpha·min of the boundary edges each side owns."""
    part = set(part)
    own = {v: 0 for v in part}
    for u, v in g.edges:
        if (u in part) != (v in part):
            own[u if u in part else v] += 1
    if len(part) < 2:
        return True
    for a, b in bipartitions(part):
        cross = sum(1 for u, v in g.edges if (u in a and v in b) or (u in b and v in a))
        if cross < alpha * min(sum(own[v] for v in a), sum(own[v] for v in b)):
            return False
    return True


def oracle_treewidth(g: Graph) -> int:
    """Minimum over all elimination orders of the induced width (n <= 8)."""
    adj0 = {v: set() for v in g.vertices}
    for u, v in g.simple_edges():
        adj0[u].add(v)
        adj0[v].add(u)
    if not adj0:
        return -1
    best = len(adj0) - 1
    for order in itertools.permutations(sorted(adj0)):
        adj = {v: set(s) for v, s in adj0.items()}
        width = 0
        for v in order:
            nb = adj.pop(v)
            width = max(width, len(nb))
            if width >= best:
                break
            for x in nb:
                adj[x] |= nb - {x}
                adj[x].discard(v)
        best = min(best, width)
    return best


def oracle_max_cycle_packing(g: Graph, modulus=None) -> int:
    cycles = list({frozenset(c) for c in nx.simple_cycles(simple_nx(g))
                   if len(c) >= 3 and (modulus is None or len(c) % modulus == 0)})
    cycles.sort(key=len)
    best = 0

    def rec(i, used, count):
        nonlocal best
        best = max(best, count)
        for j in range(i, len(cycles)):
            if not cycles[j] & used:
                rec(j + 1, used | cycles[j], count + 1)

    rec(0, frozenset(), 0)
    return best


def oracle_edge_expansion(g: Graph):
    best = None
    for a, b in bipartitions(g.vertices):
        val = Fraction(crossing(g, a), min(len(a), len(b)))
        best = val if best is None else min(best, val)
    return best

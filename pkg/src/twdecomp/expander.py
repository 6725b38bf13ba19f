"""Cut-matching game, small certified expanders, vertex splitting, and short-path embeddings."""
from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np

from .cuts_flows import _Table, max_flow
from .graph_core import Graph, GraphError

Pair = Tuple[int, int]
Matching = List[Pair]


class ProtocolError(GraphError):
    pass


class ExpanderError(GraphError):
    pass


class RoutingError(GraphError):
    pass


@dataclass
class ExpanderWitness:
    graph: Graph
    kind: str  # edge-expander | union-of-matchings
    expansion: Fraction
    verification_mode: str  # exhaustive | spectral
    matchings: List[Matching] = field(default_factory=list)

    def replay(self) -> bool:
        val, mode = measure_expansion(self.graph, self.verification_mode == "exhaustive")
        return mode == self.verification_mode and val >= self.expansion


def measure_expansion(g: Graph, exhaustive: Optional[bool] = None) -> Tuple[Fraction, str]:
    """min over cuts of |E(X, X̄)| / min(|X|, |X̄|).

    Exhaustive up to 20 vertices. Above that, the Cheeger-side bound
    lambda_2(L)/2 on the combinatorial Laplacian, rounded down to 1e-6.
    """
    n = g.n()
    if n < 2:
        return Fraction(0), "exhaustive"
    if exhaustive is None:
        exhaustive = n <= 20
    if exhaustive:
        tab = _Table(g.sorted_vertices(), g.edges, {v: 1 for v in g.vertices})
        lo = np.minimum(tab.w_a, tab.w_b)
        r = tab.cross / lo
        k = int(np.argmin(r))
        return Fraction(int(tab.cross[k]), int(lo[k])), "exhaustive"
    vs = g.sorted_vertices()
    idx = {v: i for i, v in enumerate(vs)}
    L = np.zeros((n, n))
    for u, v in g.edges:
        i, j = idx[u], idx[v]
        L[i, j] -= 1
        L[j, i] -= 1
        L[i, i] += 1
        L[j, j] += 1
    lam2 = float(np.linalg.eigvalsh(L)[1])
    return Fraction(max(0, math.floor(lam2 / 2 * 1e6) - 1), 10 ** 6), "spectral"


# ---------------------------------------------------------------------------
# cut-matching game


def _check_matching(m: Matching, ys: Sequence[int], zs: Sequence[int]):
    left = sorted(a for a, _ in m)
    right = sorted(b for _, b in m)
    if left != sorted(ys) or right != sorted(zs):
        raise ProtocolError("oracle did not return a perfect matching between the halves")


def default_matching_oracle(seed: int) -> Callable[[List[int], List[int]], Matching]:
    rng = random.Random(seed)

    def oracle(ys, zs):
        zs = list(zs)
        rng.shuffle(zs)
        return list(zip(ys, zs))

    return oracle


def krv_cut(n: int, matchings: Sequence[Matching], rng: np.random.Generator) -> Tuple[List[int], List[int]]:
    """Split [0, n) at the median of a random projection of the walk embedding.

    The walk applies the averaging step (I + M)/2 of each earlier matching
    in order, starting from a random vector orthogonal to the all-ones vector.
    """
    x = rng.standard_normal(n)
    x -= x.mean()
    for m in matchings:
        y = x.copy()
        for a, b in m:
            avg = (x[a] + x[b]) / 2
            y[a] = avg
            y[b] = avg
        x = y
    order = np.argsort(x, kind="stable")
    return sorted(int(i) for i in order[: n // 2]), sorted(int(i) for i in order[n // 2:])


def cut_matching_game(n: int, rounds: int, matching_oracle=None, seed: int = 0,
                      verify: bool = True) -> ExpanderWitness:
    """Union of ``rounds`` perfect matchings chosen against KRV cuts on [0, n)."""
    if n < 2 or n % 2:
        raise ValueError("n must be even and at least 2")
    if rounds < 0:
        raise ValueError("rounds must be non-negative")
    rng = np.random.default_rng(seed)
    oracle = matching_oracle or default_matching_oracle(seed)
    matchings: List[Matching] = []
    for _ in range(rounds):
        ys, zs = krv_cut(n, matchings, rng)
        m = [(int(a), int(b)) for a, b in oracle(ys, zs)]
        _check_matching(m, ys, zs)
        matchings.append(m)
    g = Graph(range(n), [e for m in matchings for e in m])
    if verify:
        alpha, mode = measure_expansion(g)
    else:
        alpha, mode = Fraction(0), "unverified"
    return ExpanderWitness(g, "union-of-matchings", alpha, mode, matchings)


# ---------------------------------------------------------------------------
# small expanders


def _random_near_cubic(n: int, rng: random.Random, tries: int = 500) -> Optional[List[Pair]]:
    """Simple graph with all degrees 3 (one vertex of degree 2 when n is odd)."""
    degs = [3] * n
    if n % 2:
        degs[-1] = 2
    for _ in range(tries):
        stubs = [v for v in range(n) for _ in range(degs[v])]
        rng.shuffle(stubs)
        es = set()
        for i in range(0, len(stubs), 2):
            a, b = stubs[i], stubs[i + 1]
            e = (min(a, b), max(a, b))
            if a == b or e in es:
                break
            es.add(e)
        else:
            return sorted(es)
    return None


def build_small_expander(n: int, degree: int = 3, target_alpha=Fraction(1, 10), seed: int = 0,
                         retries: int = 200) -> ExpanderWitness:
    """Random (near-)cubic graph on [0, n) with verified expansion >= target_alpha.

    n <= 4 gives the complete graph. Odd n gets one vertex of degree 2.
    """
    if degree != 3:
        raise ValueError("only degree 3 is supported")
    target = Fraction(target_alpha)
    if n <= 4:
        g = Graph(range(n), [(i, j) for i in range(n) for j in range(i + 1, n)])
        alpha, mode = measure_expansion(g) if n >= 2 else (Fraction(1), "exhaustive")
        return ExpanderWitness(g, "edge-expander", alpha, mode)
    rng = random.Random(seed)
    best = Fraction(-1)
    for _ in range(retries):
        es = _random_near_cubic(n, rng)
        if es is None:
            continue
        g = Graph(range(n), es)
        if not g.is_connected():
            continue
        alpha, mode = measure_expansion(g)
        if alpha >= target:
            return ExpanderWitness(g, "edge-expander", alpha, mode)
        best = max(best, alpha)
    raise ExpanderError(f"no expander with alpha >= {target} on {n} vertices; best {best}")


# ---------------------------------------------------------------------------
# vertex splitting


@dataclass
class SplitMap:
    clusters: Dict[int, List[int]]  # original vertex -> vertices of its expander (or itself)
    origin: Dict[int, int]  # new vertex -> original vertex
    edge_ends: Dict[int, Pair]  # index of original edge -> its endpoints in the split graph


def split_vertices(h: Graph, seed: int = 0, target_alpha=Fraction(1, 10), min_degree: int = 4
                   ) -> Tuple[Graph, SplitMap]:
    """Replace every vertex of degree d >= min_degree by a degree-3 expander on d vertices.

    Each original edge attaches to distinct expander vertices at its split
    ends, so the result has maximum degree at most 4.
    """
    deg = {v: h.degree(v) for v in h.vertices}
    clusters: Dict[int, List[int]] = {}
    origin: Dict[int, int] = {}
    new_edges: List[Pair] = []
    next_id = max(h.vertices, default=-1) + 1
    for v in h.sorted_vertices():
        d = deg[v]
        if d >= min_degree:
            wit = build_small_expander(d, 3, target_alpha, seed=seed + v)
            ids = list(range(next_id, next_id + d))
            next_id += d
            clusters[v] = ids
            for a, b in wit.graph.edges:
                new_edges.append((ids[a], ids[b]))
        else:
            clusters[v] = [v]
        for x in clusters[v]:
            origin[x] = v
    slot = {v: 0 for v in h.vertices}
    edge_ends: Dict[int, Pair] = {}
    for i, (u, v) in enumerate(h.edges):
        ends = []
        for x in (u, v):
            if len(clusters[x]) > 1:
                ends.append(clusters[x][slot[x]])
                slot[x] += 1
            else:
                ends.append(x)
        edge_ends[i] = (ends[0], ends[1])
        new_edges.append((ends[0], ends[1]))
    g2 = Graph(origin.keys(), new_edges)
    return g2, SplitMap(clusters, origin, edge_ends)


# ---------------------------------------------------------------------------
# routing matchings on short paths


@dataclass
class EmbeddingPaths:
    paths: Dict[Pair, List[int]]
    max_length: int
    edge_congestion: int
    vertex_congestion: int

    @staticmethod
    def measure(paths: Dict[Pair, List[int]]) -> Tuple[int, int, int]:
        load: Dict[Pair, int] = {}
        vload: Dict[int, int] = {}
        longest = 0
        for p in paths.values():
            longest = max(longest, len(p) - 1)
            for x in set(p):
                vload[x] = vload.get(x, 0) + 1
            for a, b in zip(p, p[1:]):
                e = (min(a, b), max(a, b))
                load[e] = load.get(e, 0) + 1
        return longest, max(load.values(), default=0), max(vload.values(), default=0)

    def recompute_ok(self) -> bool:
        return EmbeddingPaths.measure(self.paths) == (self.max_length, self.edge_congestion,
                                                      self.vertex_congestion)


def routing_caps(n: int, d_max: int, alpha, c_len: float, c_cong: float) -> Tuple[float, float]:
    """(length cap, congestion cap) = (c_len·d_max·log n/α, c_cong·log³ n/α), logs base 2."""
    lg = math.log2(max(n, 2))
    a = float(alpha)
    return c_len * d_max * lg / a, c_cong * lg ** 3 / a


def route_matchings_short_paths(host: Graph, matchings: Sequence[Matching], alpha,
                                c_len: float = 4.0, c_cong: float = 4.0, seed: int = 0,
                                retries: int = 4) -> EmbeddingPaths:
    """Connect every matched pair inside ``host`` by a path, keeping paths short and spread.

    Paths are shortest under edge lengths 1 + load·eps (eps grows between
    retries). Fails when either cap from ``routing_caps`` is exceeded.
    """
    if float(alpha) <= 0:
        raise RoutingError("host expansion must be positive")
    adj = host.adj()
    caps = routing_caps(host.n(), host.max_degree(), alpha, c_len, c_cong)
    rng = random.Random(seed)
    best = None
    for attempt in range(retries):
        eps = 0.5 * (attempt + 1)
        load: Dict[Pair, int] = {}
        paths: Dict[Pair, List[int]] = {}
        pairs = [p for m in matchings for p in m]
        if attempt:
            rng.shuffle(pairs)
        for a, b in pairs:
            p = _short_path(adj, a, b, load, eps)
            if p is None:
                raise RoutingError(f"no path between {a} and {b}")
            paths[(a, b)] = p
            for x, y in zip(p, p[1:]):
                e = (min(x, y), max(x, y))
                load[e] = load.get(e, 0) + 1
        length, cong, vcong = EmbeddingPaths.measure(paths)
        emb = EmbeddingPaths(paths, length, cong, vcong)
        if best is None or (cong, length) < (best.edge_congestion, best.max_length):
            best = emb
        if length <= caps[0] and cong <= caps[1]:
            return emb
    raise RoutingError(f"caps {caps} exceeded: length {best.max_length}, congestion {best.edge_congestion}")


def _short_path(adj, s, t, load, eps) -> Optional[List[int]]:
    import heapq

    if s == t:
        return [s]
    dist = {s: 0.0}
    prev = {}
    pq = [(0.0, s)]
    while pq:
        d, u = heapq.heappop(pq)
        if u == t:
            break
        if d > dist[u]:
            continue
        for v in sorted(set(adj[u])):
            e = (min(u, v), max(u, v))
            nd = d + 1 + eps * load.get(e, 0)
            if nd < dist.get(v, math.inf) - 1e-12:
                dist[v] = nd
                prev[v] = u
                heapq.heappush(pq, (nd, v))
    if t not in dist:
        return None
    path = [t]
    while path[-1] != s:
        path.append(prev[path[-1]])
    return path[::-1]


def edge_coloring_matchings(g: Graph) -> List[Matching]:
    """Greedy proper edge colouring; colour classes are matchings (<= 2Δ-1 of them)."""
    used: Dict[int, set] = {v: set() for v in g.vertices}
    classes: Dict[int, Matching] = {}
    deg = {v: g.degree(v) for v in g.vertices}
    for u, v in sorted(g.edges, key=lambda e: (-(deg[e[0]] + deg[e[1]]), e)):
        c = 0
        while c in used[u] or c in used[v]:
            c += 1
        used[u].add(c)
        used[v].add(c)
        classes.setdefault(c, []).append((u, v))
    return [classes[c] for c in sorted(classes)]


# ---------------------------------------------------------------------------
# degree reduction


@dataclass
class DegreeReduction:
    graph: Graph
    witness: ExpanderWitness
    terminals: List[int]
    rounds: int
    vertex_cap: int
    max_degree: int
    degree_cap: int
    round_paths: List[List[List[int]]]


def reduce_degree(g: Graph, x_terminals, alpha, rounds: int, seed: int = 0) -> DegreeReduction:
    """Embed a cut-matching expander on the terminals into g and keep only its paths.

    Each requested matching is realised by vertex-capacitated flow paths in
    g (capacity ceil(1/alpha)); the subgraph formed by all path edges has
    maximum degree at most 2·rounds·ceil(1/alpha).
    """
    alpha = Fraction(alpha)
    xs = sorted(x_terminals)
    if len(xs) % 2:
        xs = xs[:-1]
    cap = math.ceil(1 / alpha)
    if rounds == 0 or len(xs) < 2:
        empty = Graph(xs, [])
        wit = ExpanderWitness(empty, "union-of-matchings", Fraction(0), "exhaustive")
        return DegreeReduction(empty, wit, xs, rounds, cap, 0, 0, [])
    local = {v: i for i, v in enumerate(xs)}
    round_paths: List[List[List[int]]] = []

    def oracle(ys, zs):
        yv = [xs[i] for i in ys]
        zv = [xs[i] for i in zs]
        res = max_flow(g, yv, zv, "vertex", vertex_cap=cap, unit_terminals=True)
        if res.value < len(yv):
            raise ExpanderError(
                f"only {res.value} of {len(yv)} paths at vertex congestion {cap}; alpha overstated")
        counts: Dict[int, int] = {}
        for p in res.paths:
            for v in set(p):
                counts[v] = counts.get(v, 0) + 1
        assert max(counts.values()) <= cap
        round_paths.append(res.paths)
        return [(local[p[0]], local[p[-1]]) for p in res.paths]

    wit = cut_matching_game(len(xs), rounds, oracle, seed)
    es = set()
    for paths in round_paths:
        for p in paths:
            for a, b in zip(p, p[1:]):
                es.add((min(a, b), max(a, b)))
    touched = set(xs) | {v for e in es for v in e}
    g2 = Graph(touched, sorted(es))
    # relabel the witness onto the terminal ids
    wg = Graph(xs, [(xs[a], xs[b]) for a, b in wit.graph.edges])
    wit = ExpanderWitness(wg, wit.kind, wit.expansion, wit.verification_mode,
                          [[(xs[a], xs[b]) for a, b in m] for m in wit.matchings])
    bound = 2 * rounds * cap
    assert g2.max_degree() <= bound, (g2.max_degree(), bound)
    return DegreeReduction(g2, wit, xs, rounds, cap, g2.max_degree(), bound, round_paths)

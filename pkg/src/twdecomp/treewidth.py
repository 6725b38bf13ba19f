"""Exact treewidth at desk scale, elimination upper bounds, and lower-bound certificates."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, FrozenSet, List, Optional, Sequence, Tuple, Union

from .graph_core import Graph, GraphError

EXACT_LIMIT = 18


class TreewidthSizeError(GraphError):
    pass


@dataclass
class TreeDecomposition:
    bags: Dict[int, FrozenSet[int]]
    tree_edges: List[Tuple[int, int]]

    @property
    def width(self) -> int:
        return max((len(b) for b in self.bags.values()), default=0) - 1

    def validate(self, g: Graph) -> Optional[str]:
        """Return None when valid, otherwise a description of the violation."""
        nodes = set(self.bags)
        if not nodes:
            return None if g.n() == 0 else "no bags"
        # tree: connected and |E| = |V| - 1
        if len(self.tree_edges) != len(nodes) - 1:
            return "tree edge count mismatch"
        adj: Dict[int, List[int]] = {x: [] for x in nodes}
        for a, b in self.tree_edges:
            if a not in nodes or b not in nodes:
                return "tree edge references unknown node"
            adj[a].append(b)
            adj[b].append(a)
        if len(_reach(adj, next(iter(nodes)), nodes)) != len(nodes):
            return "tree is disconnected"
        covered = set().union(*self.bags.values())
        if covered != set(g.vertices):
            return "bags do not cover exactly V(g)"
        for u, v in g.simple_edges():
            if not any(u in b and v in b for b in self.bags.values()):
                return f"edge ({u},{v}) not covered"
        for v in g.vertices:
            holding = {x for x, b in self.bags.items() if v in b}
            if len(_reach(adj, next(iter(holding)), holding)) != len(holding):
                return f"bags of vertex {v} are not connected"
        return None

    def to_pace(self, g: Graph) -> str:
        """PACE .td text; bags and vertices are renumbered from 1."""
        order = sorted(self.bags)
        bid = {x: i + 1 for i, x in enumerate(order)}
        vid = {v: i + 1 for i, v in enumerate(g.sorted_vertices())}
        lines = [f"s td {len(order)} {self.width + 1} {g.n()}"]
        for x in order:
            lines.append("b " + " ".join([str(bid[x])] + [str(vid[v]) for v in sorted(self.bags[x])]))
        for a, b in self.tree_edges:
            lines.append(f"{bid[a]} {bid[b]}")
        return "\n".join(lines) + "\n"


def _reach(adj, start, allowed) -> set:
    seen = {start}
    stack = [start]
    while stack:
        x = stack.pop()
        for y in adj[x]:
            if y in allowed and y not in seen:
                seen.add(y)
                stack.append(y)
    return seen


# ---------------------------------------------------------------------------
# elimination orderings


def _simple_adj(g: Graph) -> Dict[int, set]:
    a = {v: set() for v in g.vertices}
    for u, v in g.edges:
        a[u].add(v)
        a[v].add(u)
    return a


def decomposition_from_order(g: Graph, order: Sequence[int]) -> TreeDecomposition:
    """Tree decomposition induced by eliminating vertices in ``order``."""
    adj = _simple_adj(g)
    pos = {v: i for i, v in enumerate(order)}
    if len(pos) != g.n() or set(pos) != set(g.vertices):
        raise GraphError("order must list every vertex once")
    bags: Dict[int, FrozenSet[int]] = {}
    parent: Dict[int, Optional[int]] = {}
    for v in order:
        nb = adj[v]
        bags[v] = frozenset(nb | {v})
        for a in nb:
            adj[a] |= nb - {a}
            adj[a].discard(v)
        parent[v] = min(nb, key=pos.__getitem__) if nb else None
        del adj[v]
    edges = [(v, p) for v, p in parent.items() if p is not None]
    roots = [v for v in order if parent[v] is None]
    edges += [(roots[i], roots[i + 1]) for i in range(len(roots) - 1)]
    return TreeDecomposition(bags, edges)


def elimination_width(g: Graph, order: Sequence[int]) -> int:
    return decomposition_from_order(g, order).width


def _elimination_order(g: Graph, heuristic: str) -> List[int]:
    adj = _simple_adj(g)
    order = []

    def fill(x):
        nb = list(adj[x])
        missing = sum(1 for i in range(len(nb)) for j in range(i + 1, len(nb))
                      if nb[j] not in adj[nb[i]])
        return (missing, len(nb), x)

    while adj:
        if heuristic == "min-degree":
            v = min(adj, key=lambda x: (len(adj[x]), x))
        else:
            v = min(adj, key=fill)
        nb = adj.pop(v)
        for a in nb:
            adj[a] |= nb - {a}
            adj[a].discard(v)
        order.append(v)
    return order


def tw_upper_bound(g: Graph, heuristic: str = "min-fill") -> Tuple[int, TreeDecomposition]:
    """Greedy elimination by min-degree or min-fill; ties go to the smallest id."""
    if heuristic not in ("min-degree", "min-fill"):
        raise ValueError(f"unknown heuristic {heuristic!r}")
    td = decomposition_from_order(g, _elimination_order(g, heuristic))
    return td.width, td


def minor_lower_bound(g: Graph) -> Tuple[int, List[Tuple[int, Optional[int]]]]:
    """Contraction-degeneracy lower bound (min-d heuristic).

    Repeatedly contract a minimum-degree vertex into its least-degree
    neighbour; the largest minimum degree seen bounds tw from below since
    treewidth is minor-monotone and at least the minimum degree. Returns
    the bound and the contraction sequence (merged vertex, kept vertex),
    with kept vertex None for a deleted isolated vertex.
    """
    adj = _simple_adj(g)
    best = 0
    seq: List[Tuple[int, int]] = []
    while len(adj) > 1:
        v = min(adj, key=lambda x: (len(adj[x]), x))
        best = max(best, len(adj[v]))
        nb = adj.pop(v)
        if not nb:
            seq.append((v, None))  # deleting an isolated vertex
            continue
        u = min(nb, key=lambda x: (len(adj[x]), x))
        for a in nb:
            adj[a].discard(v)
        for a in nb - {u}:
            adj[a].add(u)
            adj[u].add(a)
        seq.append((v, u))
    return best, seq


def replay_minor_bound(g: Graph, seq: Sequence[Tuple[int, Optional[int]]], claimed: int) -> bool:
    """Check that some graph along the contraction sequence has min degree >= claimed."""
    adj = _simple_adj(g)
    for v, u in seq:
        if adj and min(len(x) for x in adj.values()) >= claimed:
            return True
        if v not in adj or (u is not None and u not in adj[v]):
            return False
        nb = adj.pop(v)
        if u is None:
            for a in nb:
                adj[a].discard(v)
            continue
        for a in nb:
            adj[a].discard(v)
        for a in nb - {u}:
            adj[a].add(u)
            adj[u].add(a)
    return bool(adj) and min(len(x) for x in adj.values()) >= claimed or claimed <= 0


# ---------------------------------------------------------------------------
# exact treewidth


def _reduce_simplicial(adj: Dict[int, set]) -> Tuple[List[int], int]:
    """Eliminate simplicial vertices (no fill); returns order and width floor."""
    order, low = [], -1
    changed = True
    while changed and adj:
        changed = False
        for v in sorted(adj):
            nb = adj[v]
            if all(b in adj[a] for a in nb for b in nb if a < b):
                low = max(low, len(nb))
                for a in nb:
                    adj[a].discard(v)
                del adj[v]
                order.append(v)
                changed = True
    return order, low


def _components(adj: Dict[int, set]) -> List[List[int]]:
    seen, comps = set(), []
    for s in sorted(adj):
        if s in seen:
            continue
        comp = sorted(_reach(adj, s, adj))
        seen.update(comp)
        comps.append(comp)
    return comps


def _bits(x: int):
    while x:
        low = x & -x
        yield low.bit_length() - 1
        x ^= low


def _dp_component(adj: Dict[int, set], verts: List[int], ub: int, lb: int = 0
                  ) -> Tuple[int, Optional[List[int]]]:
    """Exact width of a connected component, or (ub, None) if nothing beats ub.

    For a connected vertex set C, the last vertex of C to be eliminated
    sees exactly N(C). So C can be eliminated within width k iff
    |N(C)| <= k and some v in C leaves components of C - v that are
    themselves eliminable. The recursion is memoized on bitmasks and
    tried for k = lb, lb+1, ... below ub.
    """
    n = len(verts)
    idx = {v: i for i, v in enumerate(verts)}
    nbm = [0] * n
    for v in verts:
        for a in adj[v]:
            nbm[idx[v]] |= 1 << idx[a]
    full = (1 << n) - 1

    def nbhd(c: int) -> int:
        out = 0
        for i in _bits(c):
            out |= nbm[i]
        return out & ~c

    def comps(c: int) -> List[int]:
        res = []
        while c:
            seed = c & -c
            comp = frontier = seed
            while frontier:
                nxt = 0
                for i in _bits(frontier):
                    nxt |= nbm[i]
                nxt &= c & ~comp
                comp |= nxt
                frontier = nxt
            res.append(comp)
            c &= ~comp
        return res

    for k in range(max(lb, 0), ub):
        memo: Dict[int, Optional[int]] = {}

        def feasible(c: int) -> bool:
            if c in memo:
                return memo[c] is not None
            nb = bin(nbhd(c)).count("1")
            if nb > k:
                memo[c] = None
                return False
            if bin(c).count("1") + nb <= k + 1:
                memo[c] = -1  # one bag holds everything
                return True
            memo[c] = None
            for v in _bits(c):
                if all(feasible(d) for d in comps(c & ~(1 << v))):
                    memo[c] = v
                    return True
            return False

        if feasible(full):
            order: List[int] = []

            def emit(c: int):
                v = memo[c]
                if v == -1:
                    order.extend(_bits(c))
                    return
                for d in comps(c & ~(1 << v)):
                    emit(d)
                order.append(v)

            emit(full)
            return k, [verts[i] for i in order]
    return ub, None


def exact_treewidth(g: Graph, limit: int = EXACT_LIMIT) -> Tuple[int, TreeDecomposition]:
    """Exact treewidth with a witnessing decomposition.

    Simplicial vertices are eliminated first, then each remaining component
    is solved by subset DP bounded by the min-fill width.
    """
    if g.n() == 0:
        return -1, TreeDecomposition({}, [])
    if g.n() > limit:
        raise TreewidthSizeError(f"{g.n()} vertices exceeds exact limit {limit}; use bounds")
    adj = _simple_adj(g)
    order, low = _reduce_simplicial(adj)
    width = max(low, 0)
    for comp in _components(adj):
        sub = {v: adj[v] & set(comp) for v in comp}
        subg = Graph(comp, [(u, v) for u in comp for v in sub[u] if u < v])
        fallback = _elimination_order(subg, "min-fill")
        ub = elimination_width(subg, fallback)
        if ub <= width:
            order += fallback
            continue
        lb, _ = minor_lower_bound(subg)
        val, o = _dp_component(sub, comp, ub, max(lb, width))
        if o is None:
            val = ub
        order += fallback if o is None else o
        width = max(width, val)
    td = decomposition_from_order(g, order)
    assert td.width == width, (td.width, width)
    return width, td


def treewidth_branch_and_bound(g: Graph) -> int:
    """Independent exact oracle: depth-first search over elimination orders.

    Pruned by the incumbent width, the simplicial rule, and the minimum
    degree of the remaining graph as a lower bound. Exponential; small inputs only.
    """
    if g.n() == 0:
        return -1
    adj0 = _simple_adj(g)
    best = [len(adj0) - 1]

    def rec(adj: Dict[int, set], cur: int):
        if cur >= best[0]:
            return
        if len(adj) - 1 <= cur:
            best[0] = cur
            return
        low = min(len(x) for x in adj.values())
        if max(cur, low) >= best[0]:
            return
        cands = sorted(adj)
        for v in cands:
            nb = adj[v]
            if all(b in adj[a] for a in nb for b in nb if a != b):
                cands = [v]
                break
        for v in cands:
            d = len(adj[v])
            if max(cur, d) >= best[0]:
                continue
            nxt = {x: set(s) for x, s in adj.items() if x != v}
            nb = adj[v]
            for a in nb:
                nxt[a] |= nb - {a}
                nxt[a].discard(v)
            rec(nxt, max(cur, d))

    rec(adj0, 0)
    return best[0]


def treewidth_at_least(g: Graph, r: int, limit: int = EXACT_LIMIT) -> Tuple[bool, str]:
    """Decide tw(g) >= r soundly: exact when small, minor bound otherwise.

    Returns (holds, method). A False from the minor bound on a large graph
    means "not proven", not a refutation.
    """
    if r <= 0:
        return True, "trivial"
    if r == 1:
        return g.m() > 0, "edge"
    if r == 2:
        # tw >= 2 iff the underlying simple graph is not a forest
        return len(g.simple_edges()) > g.n() - len(g.components()), "cycle"
    lb, _ = minor_lower_bound(g)
    if lb >= r:
        return True, "minor"
    core = _core_after_pruning(g)
    if core.n() <= limit:
        return exact_treewidth(core, limit)[0] >= r, "exact"
    return False, "unproven"


def _core_after_pruning(g: Graph) -> Graph:
    """Drop vertices of degree <= 1 repeatedly (tw unchanged when tw >= 1)."""
    adj = _simple_adj(g)
    changed = True
    while changed:
        changed = False
        for v in list(adj):
            if len(adj[v]) <= 1:
                for a in adj[v]:
                    adj[a].discard(v)
                del adj[v]
                changed = True
    keep = set(adj)
    return g.induced(keep)


# ---------------------------------------------------------------------------
# certificate arithmetic


def tw_lower_bound_from_well_linked(t_size: int, alpha, delta: int) -> int:
    """max(0, ceil(alpha·t/(3·delta)) - 1) for an alpha-well-linked set of size t."""
    alpha = Fraction(alpha)
    if not (0 < alpha <= 1):
        raise ValueError("alpha must lie in (0, 1]")
    if delta < 1:
        raise ValueError("delta must be at least 1")
    return max(0, math.ceil(alpha * t_size / (3 * delta)) - 1)


def node_well_linked_bounds(x_size: int) -> Tuple[int, int]:
    """(lower, upper) treewidth bounds implied by a largest node-well-linked set of size x.

    The lower end is ceil(x/4) - 1: a bag S that splits X evenly forces
    min(|X∩A|, |X∩B|) >= (x - |S|)/3 disjoint paths through S. Anything
    stronger fails small cases (K3 has x = 3 and tw 2, and there are tw-2
    graphs on seven vertices with x = 4).
    """
    if x_size <= 0:
        return 0, 0
    return max(0, -(-x_size // 4) - 1), 4 * x_size


@dataclass
class TwCertificate:
    """Proof that tw(g) > w: an exact value, a well-linked set, or a minor bound."""
    kind: str
    bound: int
    detail: dict = field(default_factory=dict)


def decompose_or_certify(g: Graph, w: int, limit: int = EXACT_LIMIT, cfg=None
                         ) -> Union[TreeDecomposition, TwCertificate]:
    """Either a decomposition of width <= 4w or a certificate that tw(g) > w."""
    if w < 1:
        raise ValueError("w must be at least 1")
    if g.n() <= limit:
        tw, td = exact_treewidth(g, limit)
        if tw <= w:
            return td
        return TwCertificate("exact", tw)
    # a lower bound above w is the stronger answer, so it is tried first
    lb, seq = minor_lower_bound(g)
    if lb > w:
        return TwCertificate("minor", lb, {"contractions": seq})
    ub, td = tw_upper_bound(g, "min-fill")
    if ub <= 4 * w:
        return td
    from .well_linked import find_well_linked_set
    cert = find_well_linked_set(g, cfg)
    bound = tw_lower_bound_from_well_linked(len(cert.terminal_set), cert.alpha, max(1, g.max_degree()))
    if bound > w:
        return TwCertificate("well-linked", bound, {"certificate": cert})
    raise TreewidthSizeError(
        f"undetermined: min-fill width {ub} > {4 * w} but best lower bound {max(lb, bound)} <= {w}")

"""Cycle packing versus covering, a bag-state packing DP, and the FPT decision skeleton."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Dict, FrozenSet, Iterator, List, Optional, Sequence, Tuple

from .graph_core import Graph, GraphError
from .treewidth import (EXACT_LIMIT, TreeDecomposition, TreewidthSizeError,
                        decompose_or_certify, exact_treewidth, tw_upper_bound)

DP_WIDTH_LIMIT = 8

Cycle = Tuple[int, ...]


# ---------------------------------------------------------------------------
# families


@dataclass(frozen=True)
class CycleFamily:
    """Simple cycles of length >= 3, optionally restricted to lengths divisible by ``modulus``.

    Parallel edges never form a cycle here: membership is decided on the
    underlying simple graph.
    """
    modulus: Optional[int] = None

    @property
    def name(self) -> str:
        return "cycles" if self.modulus is None else f"cycles-0-mod-{self.modulus}"

    @property
    def min_length(self) -> int:
        return 3 if self.modulus is None else max(3, self.modulus)

    def accepts(self, length: int) -> bool:
        return length >= 3 and (self.modulus is None or length % self.modulus == 0)

    def find(self, adj: Dict[int, set], allowed: FrozenSet[int]) -> Optional[Cycle]:
        """Some member inside ``allowed``, or None."""
        if self.modulus is None:
            return _any_cycle(adj, allowed)
        for v in sorted(allowed):
            for c in self.cycles_through(adj, v, allowed, lowest=True):
                return c
        return None

    def cycles_through(self, adj: Dict[int, set], v: int, allowed: FrozenSet[int],
                       lowest: bool = False) -> Iterator[Cycle]:
        """Every member through v (each once); with ``lowest`` only those where v is the minimum."""
        def ok(x):
            return x in allowed and (not lowest or x > v)

        path = [v]
        on = {v}
        stack = [iter(sorted(adj[v]))]
        while stack:
            nxt = next(stack[-1], None)
            if nxt is None:
                stack.pop()
                on.discard(path.pop())
                continue
            if nxt == v and len(path) >= 3 and path[1] < path[-1] and self.accepts(len(path)):
                yield tuple(path)
                continue
            if nxt in on or not ok(nxt):
                continue
            path.append(nxt)
            on.add(nxt)
            stack.append(iter(sorted(adj[nxt])))

    def is_member(self, adj: Dict[int, set], cyc: Sequence[int]) -> bool:
        if len(set(cyc)) != len(cyc) or not self.accepts(len(cyc)):
            return False
        return all(cyc[(i + 1) % len(cyc)] in adj[cyc[i]] for i in range(len(cyc)))


def _simple_adj(g: Graph) -> Dict[int, set]:
    adj = {v: set() for v in g.vertices}
    for u, v in g.simple_edges():
        adj[u].add(v)
        adj[v].add(u)
    return adj


def _any_cycle(adj: Dict[int, set], allowed: FrozenSet[int]) -> Optional[Cycle]:
    seen: set = set()
    for root in sorted(allowed):
        if root in seen:
            continue
        seen.add(root)
        parent = {root: None}
        on_path = {root}
        stack = [(root, iter(sorted(adj[root])))]
        while stack:
            x, it = stack[-1]
            y = next(it, None)
            if y is None:
                stack.pop()
                on_path.discard(x)
                continue
            if y not in allowed or y == parent[x]:
                continue
            if y in on_path:
                cyc = [x]
                while cyc[-1] != y:
                    cyc.append(parent[cyc[-1]])
                return tuple(cyc)
            if y in seen:
                continue
            seen.add(y)
            parent[y] = x
            on_path.add(y)
            stack.append((y, iter(sorted(adj[y]))))
    return None


def _components(adj: Dict[int, set], allowed) -> List[FrozenSet[int]]:
    seen, out = set(), []
    for s in sorted(allowed):
        if s in seen:
            continue
        comp, todo = {s}, [s]
        seen.add(s)
        while todo:
            x = todo.pop()
            for y in adj[x]:
                if y in allowed and y not in seen:
                    seen.add(y)
                    comp.add(y)
                    todo.append(y)
        out.append(frozenset(comp))
    return out


def _prune(adj: Dict[int, set], allowed: FrozenSet[int]) -> FrozenSet[int]:
    """Drop vertices of degree <= 1 inside ``allowed`` until none remain; no cycle is lost."""
    keep = set(allowed)
    deg = {v: sum(1 for u in adj[v] if u in keep) for v in keep}
    todo = [v for v in keep if deg[v] <= 1]
    while todo:
        v = todo.pop()
        if v not in keep:
            continue
        keep.discard(v)
        for u in adj[v]:
            if u in keep:
                deg[u] -= 1
                if deg[u] == 1:
                    todo.append(u)
    return frozenset(keep)


def max_packing(g: Graph, family: CycleFamily = CycleFamily(), limit: Optional[int] = None,
                allowed=None) -> List[Cycle]:
    """A maximum set of vertex-disjoint members (stops early once ``limit`` are found).

    Branches on a vertex: either it is unused, or it lies on one of the
    inclusion-minimal members through it. Exponential; meant for small graphs.
    """
    adj = _simple_adj(g)
    allowed = frozenset(g.vertices if allowed is None else allowed)
    best: List[Cycle] = []

    def rec(avail: FrozenSet[int], chosen: List[Cycle]):
        nonlocal best
        if len(chosen) > len(best):
            best = list(chosen)
        if limit is not None and len(best) >= limit:
            return
        avail = _prune(adj, avail)
        if len(chosen) + len(avail) // family.min_length <= len(best):
            return
        if not avail:
            return
        v = max(sorted(avail), key=lambda x: sum(1 for u in adj[x] if u in avail))
        cycles = list(family.cycles_through(adj, v, avail))
        sets = sorted({frozenset(c): c for c in cycles}.items(), key=lambda kv: (len(kv[0]), kv[1]))
        minimal: List[Tuple[FrozenSet[int], Cycle]] = []
        for s, c in sets:
            if not any(t <= s for t, _ in minimal):
                minimal.append((s, c))
        for s, c in minimal:
            chosen.append(c)
            rec(avail - s, chosen)
            chosen.pop()
            if limit is not None and len(best) >= limit:
                return
        rec(avail - {v}, chosen)

    rec(allowed, [])
    return best[:limit] if limit is not None else best


# ---------------------------------------------------------------------------
# outcomes


@dataclass
class EPOutcome:
    kind: str  # "packing" | "cover"
    k: int
    family: str
    strategy: str
    packing: List[Cycle] = field(default_factory=list)
    cover: FrozenSet[int] = frozenset()
    bound_used: dict = field(default_factory=dict)
    trace: List[dict] = field(default_factory=list)

    def verify(self, g: Graph, family: CycleFamily) -> bool:
        adj = _simple_adj(g)
        if self.kind == "packing":
            if len(self.packing) < self.k:
                return False
            used: set = set()
            for c in self.packing:
                if not family.is_member(adj, c) or used & set(c):
                    return False
                used |= set(c)
            return True
        if not self.cover <= g.vertices:
            return False
        return family.find(adj, frozenset(g.vertices - self.cover)) is None

    def to_json(self) -> dict:
        return {
            "kind": self.kind,
            "k": self.k,
            "family": self.family,
            "strategy": self.strategy,
            "packing": [list(c) for c in self.packing],
            "cover": sorted(self.cover),
            "bound_used": self.bound_used,
            "trace": self.trace,
        }


@dataclass(frozen=True)
class EPConfig:
    beta: float = 10.0  # divide-and-conquer constant; 10 covers growth factor 2 with log base 2
    growth: float = 2.0  # h(k+1) <= growth·h(k) for h(k) = k(w+1)/2
    exact_limit: int = EXACT_LIMIT
    complete_packing: bool = True  # search for k members before settling on a cover


def _working_decomposition(g: Graph, exact_limit: int) -> TreeDecomposition:
    if g.n() <= exact_limit:
        return exact_treewidth(g, exact_limit)[1]
    return tw_upper_bound(g, "min-fill")[1]


class _Tree:
    """A tree decomposition restricted to a vertex subset, with subtree unions."""

    def __init__(self, td: TreeDecomposition, allowed: FrozenSet[int]):
        self.bags = {x: b & allowed for x, b in td.bags.items()}
        self.adj: Dict[int, List[int]] = {x: [] for x in td.bags}
        for a, b in td.tree_edges:
            self.adj[a].append(b)
            self.adj[b].append(a)
        for x in self.adj:
            self.adj[x].sort()

    def restricted(self, allowed: FrozenSet[int]) -> "_Tree":
        out = _Tree.__new__(_Tree)
        out.adj = self.adj
        out.bags = {x: b & allowed for x, b in self.bags.items()}
        return out

    def side(self, start: int, blocked: int) -> FrozenSet[int]:
        """Tree nodes reachable from start without entering ``blocked``."""
        seen, todo = {start}, [start]
        while todo:
            x = todo.pop()
            for y in self.adj[x]:
                if y != blocked and y not in seen:
                    seen.add(y)
                    todo.append(y)
        return frozenset(seen)

    def union(self, nodes) -> FrozenSet[int]:
        out: set = set()
        for x in nodes:
            out |= self.bags[x]
        return frozenset(out)


# ---------------------------------------------------------------------------
# strategy: peel one bag per member


def _thomassen(adj, family: CycleFamily, tree: _Tree, allowed: FrozenSet[int], k: int,
               trace: List[dict]) -> Tuple[str, list]:
    if k == 0:
        return "packing", []
    if family.find(adj, allowed) is None:
        return "cover", []
    local = tree.restricted(allowed)
    v = min(local.bags)
    t1 = frozenset(local.bags)
    # descend while some member of G_{T1} avoids X_v; each step shrinks T1
    while True:
        s = local.union(t1)
        h = family.find(adj, s - local.bags[v])
        if h is None:
            break
        hs = set(h)
        for u in local.adj[v]:
            if u not in t1:
                continue
            branch = local.side(u, v)
            if hs <= local.union(branch):
                v, t1 = u, branch
                break
        else:  # pragma: no cover - separation property of tree decompositions
            raise AssertionError("member not contained in a single branch")
    member = family.find(adj, local.union(t1))
    assert member is not None and set(member) & local.bags[v]
    xv = local.bags[v]
    trace.append({"k": k, "node": v, "subtree": len(t1), "peeled": sorted(xv)})
    kind, rest = _thomassen(adj, family, tree, allowed - xv, k - 1, trace)
    if kind == "packing":
        assert all(not (set(c) & set(member)) for c in rest)
        return "packing", rest + [member]
    return "cover", rest + sorted(xv)


# ---------------------------------------------------------------------------
# strategy: balanced separators


def _packing_number(g: Graph, family, comp, cache) -> int:
    if comp not in cache:
        cache[comp] = len(max_packing(g, family, allowed=comp))
    return cache[comp]


def _divide(g: Graph, adj, family: CycleFamily, tree: _Tree, allowed: FrozenSet[int], p: int,
            w: int, cfg: EPConfig, cache, trace: List[dict]) -> FrozenSet[int]:
    """A cover of g[allowed], whose packing number is p, within β·h(p)·log2(p+1)."""
    if p == 0:
        return frozenset()
    bags = {x: b & allowed for x, b in tree.bags.items()}
    root = min(bags)
    parent: Dict[int, Optional[int]] = {root: None}
    depth = {root: 0}
    order = [root]
    for x in order:
        for y in tree.adj[x]:
            if y not in parent:
                parent[y] = x
                depth[y] = depth[x] + 1
                order.append(y)
    below: Dict[int, FrozenSet[int]] = {}
    for x in reversed(order):
        s = set(bags[x])
        for y in tree.adj[x]:
            if parent.get(y) == x:
                s |= below[y]
        below[x] = frozenset(s)
    cap = (2 * p) // 3

    def big_component(region):
        for comp in _components(adj, region):
            if _packing_number(g, family, comp, cache) > cap:
                return comp
        return None

    large = [x for x in order if big_component(below[x] - bags[x]) is not None]
    if root not in large:
        sep = bags[root]
        trace.append({"p": p, "separator": sorted(sep), "node": root})
    else:
        t = max(large, key=lambda x: (depth[x], -x))
        gp = big_component(allowed - bags[t])
        child = next(y for y in tree.adj[t] if parent.get(y) == t and gp <= below[y])
        sep = bags[t] | bags[child]
        trace.append({"p": p, "separator": sorted(sep), "node": t, "child": child})
    assert len(sep) <= 2 * (w + 1)
    cover = set(sep)
    for comp in _components(adj, allowed - sep):
        pi = _packing_number(g, family, comp, cache)
        assert pi <= cap
        cover |= _divide(g, adj, family, tree, comp, pi, w, cfg, cache, trace)
    bound = divide_bound(p, w, cfg)
    assert len(cover) <= bound + 1e-9, (len(cover), bound)
    return frozenset(cover)


def divide_bound(k: int, w: int, cfg: EPConfig = EPConfig()) -> float:
    """β·h(k)·log2(k+1) with h(k) = k(w+1)/2."""
    return cfg.beta * (k * (w + 1) / 2) * math.log2(k + 1)


# ---------------------------------------------------------------------------
# entry points


def _ep(g: Graph, k: int, family: CycleFamily, strategy: str, cfg: EPConfig) -> EPOutcome:
    if k < 1:
        raise ValueError("k must be at least 1")
    if strategy not in ("thomassen", "divide-conquer"):
        raise ValueError(f"unknown strategy {strategy!r}")
    adj = _simple_adj(g)
    td = _working_decomposition(g, cfg.exact_limit)
    w = td.width
    tree = _Tree(td, frozenset(g.vertices))
    allowed = frozenset(g.vertices)
    trace: List[dict] = []
    if strategy == "thomassen":
        kind, items = _thomassen(adj, family, tree, allowed, k, trace)
        bound = {"formula": "k*(w+1)", "k": k, "w": w, "value": k * (w + 1)}
        if kind == "packing":
            return EPOutcome("packing", k, family.name, strategy, packing=items, bound_used=bound, trace=trace)
        cover = frozenset(items)
        assert len(cover) <= k * (w + 1)
        if cfg.complete_packing:
            found = max_packing(g, family, limit=k)
            if len(found) >= k:
                trace.append({"completed": "exhaustive packing search"})
                return EPOutcome("packing", k, family.name, strategy, packing=found,
                                 bound_used=bound, trace=trace)
        return EPOutcome("cover", k, family.name, strategy, cover=cover, bound_used=bound, trace=trace)
    found = max_packing(g, family, limit=k)
    if len(found) >= k:
        return EPOutcome("packing", k, family.name, strategy, packing=found,
                         bound_used={"formula": "packing", "k": k, "w": w}, trace=trace)
    p = len(found)
    cover = _divide(g, adj, family, tree, allowed, p, w, cfg, {}, trace)
    bound = {"formula": "beta*h(p)*log2(p+1), h(p)=p*(w+1)/2", "k": k, "p": p, "w": w,
             "beta": cfg.beta, "value": divide_bound(p, w, cfg)}
    return EPOutcome("cover", k, family.name, strategy, cover=cover, bound_used=bound, trace=trace)


def ep_cycles(g: Graph, k: int, strategy: str = "thomassen", cfg: EPConfig = EPConfig()) -> EPOutcome:
    """k vertex-disjoint cycles, or a vertex set meeting every cycle."""
    return _ep(g, k, CycleFamily(), strategy, cfg)


def ep_mod_cycles(g: Graph, k: int, m: int, strategy: str = "thomassen",
                  cfg: EPConfig = EPConfig()) -> EPOutcome:
    """Same as ep_cycles for cycles whose length is divisible by m."""
    if m < 2:
        raise ValueError("modulus must be at least 2")
    return _ep(g, k, CycleFamily(m), strategy, cfg)


# ---------------------------------------------------------------------------
# bag-state dynamic programming
#
# A state maps each bag vertex to -1 (no chosen edge yet), -2 (two chosen
# edges) or, for an endpoint of a partial path, the other endpoint.


def _add_edge(st: Dict[int, int], a: int, b: int) -> Optional[int]:
    """Choose edge ab in place; returns the number of cycles closed, or None if illegal."""
    sa, sb = st[a], st[b]
    if sa == -2 or sb == -2:
        return None
    if sa == -1 and sb == -1:
        st[a], st[b] = b, a
        return 0
    if sa == -1 or sb == -1:
        if sa == -1:
            a, b, sa, sb = b, a, sb, sa
        # a is an endpoint with partner sa, b is fresh
        st[sa], st[b], st[a] = b, sa, -2
        return 0
    if sa == b:
        st[a] = st[b] = -2
        return 1
    st[sa], st[sb] = sb, sa
    st[a] = st[b] = -2
    return 0


def _key(st: Dict[int, int]) -> Tuple[Tuple[int, int], ...]:
    return tuple(sorted(st.items()))


def _forget(table: dict, v: int, nbrs: List[int]) -> dict:
    out: dict = {}
    for key, val in table.items():
        base = dict(key)
        need = {-1: (0, 2), -2: (0,)}.get(base[v], (1,))
        # chosen edge subsets of size 0..2 from v into the bag
        options = [()]
        if any(n > 0 for n in need):
            options += [(u,) for u in nbrs]
            options += [(u, x) for i, u in enumerate(nbrs) for x in nbrs[i + 1:]]
        for opt in options:
            st = dict(base)
            gained, ok = 0, True
            for u in opt:
                got = _add_edge(st, v, u)
                if got is None:
                    ok = False
                    break
                gained += got
            if not ok or st[v] not in (-1, -2):
                continue
            if base[v] == -1 and st[v] == -1 and opt:
                continue
            del st[v]
            k2 = _key(st)
            if out.get(k2, -1) < val + gained:
                out[k2] = val + gained
    return out


def _join(t1: dict, t2: dict) -> dict:
    out: dict = {}
    for k1, v1 in t1.items():
        s1 = dict(k1)
        for k2, v2 in t2.items():
            s2 = dict(k2)
            merged = _merge(s1, s2)
            if merged is None:
                continue
            st, closed = merged
            k = _key(st)
            if out.get(k, -1) < v1 + v2 + closed:
                out[k] = v1 + v2 + closed
    return out


def _deg(code: int) -> int:
    return 0 if code == -1 else 2 if code == -2 else 1


def _merge(s1: Dict[int, int], s2: Dict[int, int]):
    deg = {x: _deg(s1[x]) + _deg(s2[x]) for x in s1}
    if any(d > 2 for d in deg.values()):
        return None
    # endpoints in the union are joined by virtual edges from both pairings
    links: Dict[int, List[int]] = {x: [] for x in s1}
    for s in (s1, s2):
        for x, c in s.items():
            if c >= 0 and x < c:
                links[x].append(c)
                links[c].append(x)
    st: Dict[int, int] = {}
    closed = 0
    seen: set = set()
    for x in sorted(s1):
        if x in seen:
            continue
        if not links[x]:
            st[x] = -1 if deg[x] == 0 else -2
            seen.add(x)
            continue
        if len(links[x]) == 1:
            # walk the chain to its other end
            prev, cur = None, x
            seen.add(cur)
            while True:
                nxt = [y for y in links[cur] if y != prev] if prev is not None else links[cur]
                if not nxt:
                    break
                prev, cur = cur, nxt[0]
                seen.add(cur)
                if len(links[cur]) == 1:
                    break
            st[x], st[cur] = cur, x
    for x in sorted(s1):
        if x in seen:
            continue
        # remaining linked vertices lie on closed loops
        cur, prev = x, None
        while cur not in seen:
            seen.add(cur)
            st[cur] = -2
            a, b = links[cur]
            nxt = a if a != prev else b
            prev, cur = cur, nxt
        closed += 1
    for x in s1:
        if x not in st:
            st[x] = -2
    return st, closed


def cycle_packing_dp(td: TreeDecomposition, g: Graph, width_limit: int = DP_WIDTH_LIMIT) -> int:
    """Maximum number of vertex-disjoint cycles (length >= 3), by DP over td's bags."""
    bad = td.validate(g)
    if bad is not None:
        raise GraphError(f"invalid tree decomposition: {bad}")
    if td.width > width_limit:
        raise TreewidthSizeError(f"width {td.width} exceeds the DP limit {width_limit}")
    if g.n() == 0:
        return 0
    adj = _simple_adj(g)
    tadj: Dict[int, List[int]] = {x: [] for x in td.bags}
    for a, b in td.tree_edges:
        tadj[a].append(b)
        tadj[b].append(a)
    root = min(td.bags)
    parent = {root: None}
    order = [root]
    for x in order:
        for y in sorted(tadj[x]):
            if y not in parent:
                parent[y] = x
                order.append(y)
    tables: Dict[int, dict] = {}
    for x in reversed(order):
        bag = td.bags[x]
        table = {_key({v: -1 for v in bag}): 0}
        for y in tadj[x]:
            if parent.get(y) != x:
                continue
            child = _lift(tables.pop(y), td.bags[y], bag, adj)
            table = _join(table, child)
        tables[x] = table
    final = _lift(tables[root], td.bags[root], frozenset(), adj)
    return max(final.values())


def _lift(table: dict, src: FrozenSet[int], dst: FrozenSet[int], adj) -> dict:
    """Move a table from bag src to bag dst: forget src - dst, then add dst - src as fresh."""
    cur = set(src)
    for v in sorted(src - dst):
        cur.discard(v)
        table = _forget(table, v, sorted(u for u in adj[v] if u in cur))
    fresh = sorted(dst - src)
    if fresh:
        table = {_key({**dict(k), **{v: -1 for v in fresh}}): val for k, val in table.items()}
    return table


# ---------------------------------------------------------------------------
# FPT skeleton


@dataclass(frozen=True)
class ParameterPlugin:
    name: str
    threshold: int  # treewidth at which the parameter is guaranteed positive
    dp: Callable[[TreeDecomposition, Graph], int]
    is_sum_over_components: bool = True


CYCLE_PACKING = ParameterPlugin("cycle-packing", 2, cycle_packing_dp, True)


@dataclass
class FptResult:
    answer: bool
    route: str  # "dp" | "decomposition"
    k_prime: int
    value: Optional[int] = None
    detail: dict = field(default_factory=dict)


def fpt_threshold(k: int, p: int) -> int:
    """Desk instantiation of k' = p²·(k+1), the width probed by decompose_or_certify."""
    return max(1, p * p * (k + 1))


def fpt_run(g: Graph, k: int, plugin: ParameterPlugin = CYCLE_PACKING, k_prime: Optional[int] = None,
            pipeline_cfg=None) -> FptResult:
    """Decide P(g) <= k: DP on a bounded-width decomposition, or k+1 disjoint high-treewidth pieces.

    A large-treewidth certificate is turned into k+1 disjoint subgraphs of
    treewidth >= p (each has P >= 1, so P(g) > k). If that pipeline cannot
    run at this size, the DP on a heuristic decomposition decides instead.
    """
    if k < 0:
        raise ValueError("k must be non-negative")
    kp = k_prime if k_prime is not None else fpt_threshold(k, plugin.threshold)
    if g.n() == 0:
        return FptResult(True, "dp", kp, 0)
    res = decompose_or_certify(g, kp)
    if isinstance(res, TreeDecomposition):
        value = _run_dp(plugin, res, g)
        return FptResult(value <= k, "dp", kp, value, {"width": res.width})
    detail: dict = {"certificate": res.kind, "bound": res.bound}
    if plugin.is_sum_over_components:
        from .decompose import PipelineConfig, decompose_thm1

        try:
            out = decompose_thm1(g, k + 1, plugin.threshold, pipeline_cfg or PipelineConfig())
            detail["subgraphs"] = [sorted(s) for s in out.subgraphs]
            return FptResult(False, "decomposition", kp, None, detail)
        except GraphError as exc:  # infeasible, failed, or a disconnected input
            detail["pipeline"] = str(exc)
    _, td = tw_upper_bound(g, "min-fill")
    value = _run_dp(plugin, td, g)
    return FptResult(value <= k, "dp", kp, value, detail)


def _run_dp(plugin: ParameterPlugin, td: TreeDecomposition, g: Graph) -> int:
    if not plugin.is_sum_over_components:
        return plugin.dp(td, g)
    total = 0
    for comp in g.components():
        sub = g.induced(comp)
        bags = {x: b & comp for x, b in td.bags.items()}
        total += plugin.dp(_restrict(td, bags), sub)
    return total


def _restrict(td: TreeDecomposition, bags: Dict[int, FrozenSet[int]]) -> TreeDecomposition:
    """Keep the tree spanned by non-empty bags (vertex traces stay connected)."""
    keep = {x for x, b in bags.items() if b}
    adj: Dict[int, List[int]] = {x: [] for x in bags}
    for a, b in td.tree_edges:
        adj[a].append(b)
        adj[b].append(a)
    # contract empty bags away by walking the tree and linking to the nearest kept ancestor
    root = min(keep)
    parent = {root: None}
    anchor = {root: root}
    order = [root]
    edges = []
    for x in order:
        for y in sorted(adj[x]):
            if y in parent:
                continue
            parent[y] = x
            order.append(y)
            if y in keep:
                if anchor[x] is not None:
                    edges.append((anchor[x], y))
                anchor[y] = y
            else:
                anchor[y] = anchor[x]
    return TreeDecomposition({x: bags[x] for x in keep}, edges)


def fpt_decide(g: Graph, k: int, plugin: ParameterPlugin = CYCLE_PACKING, k_prime: Optional[int] = None) -> bool:
    """Is P(g) <= k?"""
    return fpt_run(g, k, plugin, k_prime).answer

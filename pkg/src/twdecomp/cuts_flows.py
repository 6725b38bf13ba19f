"""Sparsest, conductance, and balanced cuts; unit-capacity flows and routing."""
from __future__ import annotations

import heapq
import math
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Dict, FrozenSet, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from .graph_core import Graph, GraphError, count_inner

INF = 1 << 60


class CutError(GraphError):
    """No admissible cut exists (too few vertices, terminals, or balance)."""


@dataclass(frozen=True)
class SolverConfig:
    mode: str = "auto"  # exact | heuristic | auto
    exact_limit: int = 18
    arv_factor: Fraction = Fraction(1)
    gamma_balance: Fraction = Fraction(1, 4)
    balance_floor: int = 1
    terminal_enum_limit: int = 12
    seed: int = 0
    restarts: int = 6

    def __post_init__(self):
        if self.exact_limit < 2:
            raise ValueError("exact_limit must be at least 2")
        if self.arv_factor < 1:
            raise ValueError("arv_factor must be at least 1")
        if self.mode not in ("exact", "heuristic", "auto"):
            raise ValueError(f"unknown solver mode {self.mode!r}")

    def with_(self, **kw) -> "SolverConfig":
        d = dict(self.__dict__)
        d.update(kw)
        return SolverConfig(**d)


@dataclass(frozen=True)
class Cut:
    side_a: FrozenSet[int]
    side_b: FrozenSet[int]
    crossing: int
    sparsity: Optional[Fraction] = None
    conductance: Optional[Fraction] = None
    exact: bool = False
    terminals_a: int = 0
    terminals_b: int = 0


def make_cut(g: Graph, a: Iterable[int], terminals: Optional[Iterable[int]] = None,
             operand: Optional[Iterable[int]] = None, exact: bool = False) -> Cut:
    """Build a Cut of ``operand`` (default V(g)) with side a and recomputed fields."""
    universe = g.vertices if operand is None else frozenset(operand)
    fa = frozenset(a) & universe
    fb = universe - fa
    crossing = inner_a = inner_b = 0
    for u, v in g.edges:
        ua, va = u in fa, v in fa
        ub, vb = u in fb, v in fb
        if (ua and vb) or (ub and va):
            crossing += 1
        elif ua and va:
            inner_a += 1
        elif ub and vb:
            inner_b += 1
    ts = frozenset(terminals) if terminals is not None else None
    spars = None
    ta = tb = 0
    if ts is not None:
        ta, tb = len(ts & fa), len(ts & fb)
        if min(ta, tb) > 0:
            spars = Fraction(crossing, min(ta, tb))
    cond = Fraction(crossing, min(inner_a, inner_b)) if min(inner_a, inner_b) > 0 else None
    return Cut(fa, fb, crossing, spars, cond, exact, ta, tb)


# ---------------------------------------------------------------------------
# exhaustive bipartition tables


class _Table:
    """Per-bipartition statistics for all cuts of a small vertex list.

    Vertex 0 of ``order`` is pinned to side B, so each cut appears once.
    """

    def __init__(self, order: Sequence[int], edges: Sequence[Tuple[int, int]],
                 weights: Optional[Dict[int, int]] = None):
        n = len(order)
        self.order = list(order)
        idx = {v: i for i, v in enumerate(order)}
        self.masks = np.arange(1, 1 << (n - 1), dtype=np.int64) << 1
        bits = [((self.masks >> i) & 1).astype(np.int32) for i in range(n)]
        mult: Dict[Tuple[int, int], int] = {}
        for u, v in edges:
            key = (idx[u], idx[v])
            mult[key] = mult.get(key, 0) + 1
        cross = np.zeros(len(self.masks), dtype=np.int32)
        in_a = np.zeros(len(self.masks), dtype=np.int32)
        for (i, j), c in mult.items():
            cross += c * (bits[i] ^ bits[j])
            in_a += c * (bits[i] & bits[j])
        self.cross = cross
        self.in_a = in_a
        self.in_b = len(edges) - cross - in_a
        if weights is not None:
            wa = np.zeros(len(self.masks), dtype=np.int32)
            for v, w in weights.items():
                if w:
                    wa += w * bits[idx[v]]
            self.w_a = wa
            self.w_b = sum(weights.values()) - wa

    def side(self, k: int) -> FrozenSet[int]:
        m = int(self.masks[k])
        return frozenset(v for i, v in enumerate(self.order) if (m >> i) & 1)


def _ratio_argmin(num: np.ndarray, den: np.ndarray) -> Optional[int]:
    ok = den > 0
    if not ok.any():
        return None
    r = np.where(ok, num / np.where(ok, den, 1), np.inf)
    best = r.min()
    # exact tie-break among float-equal candidates
    cand = np.flatnonzero(ok & (r <= best * (1 + 1e-12) + 1e-15))
    k = min(cand, key=lambda c: (Fraction(int(num[c]), int(den[c])), c))
    return int(k)


# ---------------------------------------------------------------------------
# terminal-leaf folding for sparsity problems


def _fold_terminal_leaves(g: Graph, terminals: FrozenSet[int]):
    """Merge degree-1 terminals into their neighbour.

    For thresholds at most 1 a violating (or optimal, when the optimum is at
    most 1) cut never needs to separate such a leaf from its neighbour.
    Returns (core vertex list, core edges, weights, host-of-leaf map).
    """
    adj = g.adj()
    host: Dict[int, int] = {}
    for t in sorted(terminals):
        if len(adj[t]) == 1:
            u = adj[t][0]
            if u in host or (u in terminals and len(adj[u]) == 1):
                continue
            host[t] = u
    core = [v for v in g.sorted_vertices() if v not in host]
    weights = {v: (1 if v in terminals else 0) for v in core}
    for t, u in host.items():
        weights[u] += 1
    es = [(u, v) for u, v in g.edges if u not in host and v not in host]
    return core, es, weights, host


def _unfold(side: Iterable[int], host: Dict[int, int]) -> FrozenSet[int]:
    s = set(side)
    s.update(t for t, u in host.items() if u in s)
    return frozenset(s)


# ---------------------------------------------------------------------------
# flows


class FlowNetwork:
    """Dinic max-flow on integer capacities."""

    def __init__(self, n: int):
        self.n = n
        self.head: List[List[int]] = [[] for _ in range(n)]
        self.to: List[int] = []
        self.cap: List[int] = []

    def add_edge(self, u: int, v: int, c: int, c_back: int = 0) -> int:
        self.head[u].append(len(self.to))
        self.to.append(v)
        self.cap.append(c)
        self.head[v].append(len(self.to))
        self.to.append(u)
        self.cap.append(c_back)
        return len(self.to) - 2

    def _bfs(self, s: int, t: int) -> bool:
        level = [-1] * self.n
        level[s] = 0
        q = deque([s])
        to, cap = self.to, self.cap
        while q:
            u = q.popleft()
            for e in self.head[u]:
                if cap[e] > 0 and level[to[e]] < 0:
                    level[to[e]] = level[u] + 1
                    q.append(to[e])
        self.level = level
        return level[t] >= 0

    def _dfs(self, s: int, t: int, limit: int) -> int:
        # iterative blocking-flow search
        to, cap, level, it, head = self.to, self.cap, self.level, self.it, self.head
        stack = [s]
        edges_on_path: List[int] = []
        while stack:
            u = stack[-1]
            if u == t:
                f = limit
                for e in edges_on_path:
                    f = min(f, cap[e])
                for e in edges_on_path:
                    cap[e] -= f
                    cap[e ^ 1] += f
                return f
            advanced = False
            while it[u] < len(head[u]):
                e = head[u][it[u]]
                v = to[e]
                if cap[e] > 0 and level[v] == level[u] + 1:
                    stack.append(v)
                    edges_on_path.append(e)
                    advanced = True
                    break
                it[u] += 1
            if not advanced:
                stack.pop()
                level[u] = -1
                if edges_on_path:
                    edges_on_path.pop()
                    it[stack[-1]] += 1
        return 0

    def max_flow(self, s: int, t: int, limit: int = INF) -> int:
        flow = 0
        while flow < limit and self._bfs(s, t):
            self.it = [0] * self.n
            while flow < limit:
                f = self._dfs(s, t, limit - flow)
                if f == 0:
                    break
                flow += f
        return flow

    def reachable(self, s: int) -> List[bool]:
        seen = [False] * self.n
        seen[s] = True
        q = deque([s])
        while q:
            u = q.popleft()
            for e in self.head[u]:
                if self.cap[e] > 0 and not seen[self.to[e]]:
                    seen[self.to[e]] = True
                    q.append(self.to[e])
        return seen


@dataclass
class FlowResult:
    value: int
    paths: List[List[int]]
    min_cut_side: FrozenSet[int] = field(default_factory=frozenset)


def max_flow(g: Graph, sources: Iterable[int], sinks: Iterable[int],
             capacity_mode: str = "edge", vertex_cap: int = 1,
             unit_terminals: bool = False) -> FlowResult:
    """Integral max flow between vertex sets, with a path decomposition.

    Edge mode gives every edge capacity 1; vertex mode gives every vertex
    capacity ``vertex_cap`` (node-disjoint paths when 1). A vertex in both
    sets contributes one empty path and is then used up. With
    ``unit_terminals`` each source and sink supplies/absorbs one unit.
    """
    src = g.check_subset(sources)
    snk = g.check_subset(sinks)
    shared = sorted(src & snk)
    src, snk = src - set(shared), snk - set(shared)
    removed = set(shared)
    verts = [v for v in g.sorted_vertices() if v not in removed]
    idx = {v: i for i, v in enumerate(verts)}
    nv = len(verts)
    vertex_mode = capacity_mode == "vertex"
    if capacity_mode not in ("edge", "vertex"):
        raise GraphError(f"unknown capacity mode {capacity_mode!r}")
    # vertex mode: v_in = i, v_out = nv + i
    size = (2 * nv if vertex_mode else nv) + 2
    S, T = size - 2, size - 1
    net = FlowNetwork(size)

    def tail(v):  # where flow leaves v
        return nv + idx[v] if vertex_mode else idx[v]

    def head(v):  # where flow enters v
        return idx[v]

    if vertex_mode:
        for v in verts:
            net.add_edge(idx[v], nv + idx[v], vertex_cap)
    edge_arcs = []
    for u, v in g.edges:
        if u in removed or v in removed:
            continue
        if vertex_mode:
            a1 = net.add_edge(tail(u), head(v), INF)
            a2 = net.add_edge(tail(v), head(u), INF)
            edge_arcs.append((u, v, a1, a2))
        else:
            a1 = net.add_edge(idx[u], idx[v], 1, 1)
            edge_arcs.append((u, v, a1, None))
    supply = 1 if (unit_terminals or vertex_mode) else INF
    src_arc = {s: net.add_edge(S, head(s), supply) for s in sorted(src)}
    snk_arc = {t: net.add_edge(tail(t), T, supply) for t in sorted(snk)}
    value = net.max_flow(S, T) if src and snk else 0

    # net flow per undirected edge, oriented
    flow_out: Dict[int, List[int]] = {v: [] for v in verts}
    for u, v, a1, a2 in edge_arcs:
        if vertex_mode:
            f = net.cap[a1 ^ 1] - net.cap[a2 ^ 1]
        else:
            f = 1 - net.cap[a1]
        if f > 0:
            flow_out[u].extend([v] * f)
        elif f < 0:
            flow_out[v].extend([u] * (-f))
    emit = {s: net.cap[a ^ 1] for s, a in src_arc.items()}
    absorb = {t: net.cap[a ^ 1] for t, a in snk_arc.items()}
    paths = _decompose_paths(flow_out, emit, absorb)
    reach = net.reachable(S) if src and snk else [False] * size
    side = frozenset(v for v in verts if reach[head(v)])
    return FlowResult(value + len(shared), [[v] for v in shared] + paths, side)


def _decompose_paths(flow_out: Dict[int, List[int]], emit: Dict[int, int],
                     absorb: Dict[int, int]) -> List[List[int]]:
    """Split a conserved flow into source-to-sink paths, dropping circulations."""
    paths: List[List[int]] = []
    for s in sorted(emit):
        for _ in range(emit[s]):
            path = [s]
            pos = {s: 0}
            cur = s
            while not absorb.get(cur):
                nxt = flow_out[cur].pop()
                if nxt in pos:  # cancel a circulation
                    for x in path[pos[nxt] + 1:]:
                        del pos[x]
                    path = path[: pos[nxt] + 1]
                    cur = nxt
                    continue
                pos[nxt] = len(path)
                path.append(nxt)
                cur = nxt
            absorb[cur] -= 1
            paths.append(path)
    return paths


def min_cut_value(g: Graph, a_terms: Iterable[int], b_terms: Iterable[int]) -> Tuple[int, FrozenSet[int]]:
    """Minimum number of edges separating a_terms from b_terms, and the source side."""
    res = max_flow(g, a_terms, b_terms, "edge")
    return res.value, res.min_cut_side | frozenset(a_terms)


# ---------------------------------------------------------------------------
# heuristic machinery


def _spectral_orders(g: Graph, seed: int, count: int) -> List[List[int]]:
    """Vertex orders from low eigenvectors of the normalized Laplacian."""
    vs = g.sorted_vertices()
    n = len(vs)
    if n <= 2:
        return [vs]
    idx = {v: i for i, v in enumerate(vs)}
    A = np.zeros((n, n))
    for u, v in g.edges:
        A[idx[u], idx[v]] += 1
        A[idx[v], idx[u]] += 1
    d = A.sum(axis=1)
    dinv = np.where(d > 0, 1 / np.sqrt(np.maximum(d, 1e-12)), 0.0)
    L = np.eye(n) - dinv[:, None] * A * dinv[None, :]
    w, U = np.linalg.eigh(L)
    rng = np.random.default_rng(seed)
    k = min(n - 1, 4)
    vecs = [U[:, i] * dinv for i in range(1, k + 1)]
    orders = []
    for vec in vecs:
        orders.append([vs[i] for i in np.argsort(vec, kind="stable")])
    for _ in range(count):
        coef = rng.standard_normal(k) / np.sqrt(np.maximum(w[1:k + 1], 1e-9))
        vec = sum(c * x for c, x in zip(coef, vecs))
        orders.append([vs[i] for i in np.argsort(vec, kind="stable")])
    # BFS orders from a few roots give contiguous sides on sparse graphs
    adj = g.adj()
    for r in rng.choice(n, size=min(n, 3), replace=False):
        root = vs[int(r)]
        seen = {root}
        order = [root]
        q = deque([root])
        while q:
            x = q.popleft()
            for y in sorted(set(adj[x])):
                if y not in seen:
                    seen.add(y)
                    order.append(y)
                    q.append(y)
        order += [v for v in vs if v not in seen]
        orders.append(order)
    return orders


class _State:
    """Incremental statistics of a bipartition (side A grows/shrinks)."""

    def __init__(self, g: Graph, weights: Dict[int, int], zw: Dict[int, int]):
        self.adj = g.adj()
        self.m = g.m()
        self.a: set = set()
        self.cross = 0
        self.in_a = 0
        self.w_a = 0
        self.z_a = 0
        self.weights = weights
        self.zw = zw

    def delta(self, v: int):
        na = sum(1 for y in self.adj[v] if y in self.a)
        deg = len(self.adj[v])
        if v in self.a:
            return (na - (deg - na), -na, -self.weights.get(v, 0), -self.zw.get(v, 0))
        return (deg - 2 * na, na, self.weights.get(v, 0), self.zw.get(v, 0))

    def flip(self, v: int):
        dc, di, dw, dz = self.delta(v)
        self.cross += dc
        self.in_a += di
        self.w_a += dw
        self.z_a += dz
        if v in self.a:
            self.a.remove(v)
        else:
            self.a.add(v)


Objective = Callable[[int, int, int, int, int], Optional[float]]


def _local_search(g: Graph, start: FrozenSet[int], objective, weights, zw, passes: int = 8):
    st = _State(g, weights, zw)
    for v in start:
        st.flip(v)
    cur = objective(st.cross, st.in_a, st.m - st.cross - st.in_a, st.w_a, st.z_a)
    vs = g.sorted_vertices()
    for _ in range(passes):
        improved = False
        for v in vs:
            dc, di, dw, dz = st.delta(v)
            val = objective(st.cross + dc, st.in_a + di, st.m - st.cross - dc - st.in_a - di,
                            st.w_a + dw, st.z_a + dz)
            if val is not None and (cur is None or val < cur - 1e-12):
                st.flip(v)
                cur = val
                improved = True
        if not improved:
            break
    return frozenset(st.a), cur


def _heuristic_search(g: Graph, objective, weights: Dict[int, int], zw: Dict[int, int],
                      cfg: SolverConfig) -> Optional[FrozenSet[int]]:
    """Sweep cuts over spectral/BFS orders, then greedy single-vertex moves."""
    best, best_val = None, None
    comps = g.components()
    candidates: List[FrozenSet[int]] = []
    if len(comps) > 1:
        acc: set = set()
        for c in comps[:-1]:
            candidates.append(frozenset(c))
            acc |= c
            candidates.append(frozenset(acc))
    for order in _spectral_orders(g, cfg.seed, cfg.restarts):
        st = _State(g, weights, zw)
        sweep_best, sweep_val = None, None
        for i, v in enumerate(order[:-1]):
            st.flip(v)
            val = objective(st.cross, st.in_a, st.m - st.cross - st.in_a, st.w_a, st.z_a)
            if val is not None and (sweep_val is None or val < sweep_val - 1e-12):
                sweep_best, sweep_val = i, val
        if sweep_best is not None:
            candidates.append(frozenset(order[: sweep_best + 1]))
    for cand in candidates:
        side, val = _local_search(g, cand, objective, weights, zw)
        if val is not None and (best_val is None or val < best_val - 1e-12):
            best, best_val = side, val
    return best


def _use_exact(cfg: SolverConfig, size: int) -> bool:
    if cfg.mode == "exact":
        if size > cfg.exact_limit:
            raise CutError(f"exact mode limited to {cfg.exact_limit} vertices, got {size}")
        return True
    if cfg.mode == "heuristic":
        return False
    return size <= cfg.exact_limit


# ---------------------------------------------------------------------------
# public cut solvers


def sparsest_cut(g: Graph, terminals: Iterable[int], cfg: SolverConfig = SolverConfig()) -> Cut:
    """Cut of V(g) minimizing crossing / min(|T∩A|, |T∩B|)."""
    ts = g.check_subset(terminals)
    if g.n() < 2:
        raise CutError("sparsest cut needs at least 2 vertices")
    if len(ts) < 2:
        raise CutError("sparsest cut needs at least 2 terminals")
    core, es, weights, host = _fold_terminal_leaves(g, ts)
    # a lone separated leaf terminal always gives sparsity exactly 1
    leaf_cut = None
    if host:
        t = min(host)
        leaf_cut = make_cut(g, [t], ts)
    best: Optional[Cut] = None
    n_core = len(core)
    if n_core >= 2 and _use_exact(cfg, n_core):
        tab = _Table(core, es, weights)
        k = _ratio_argmin(tab.cross, np.minimum(tab.w_a, tab.w_b))
        if k is not None:
            best = make_cut(g, _unfold(tab.side(k), host), ts, exact=True)
        exact = True
    elif n_core >= 2 and cfg.mode == "auto" and sum(1 for w in weights.values() if w) <= cfg.terminal_enum_limit:
        best = _sparsest_by_terminal_splits(g, core, es, weights, host, ts)
        exact = True
    elif n_core >= 2:
        core_g = Graph(core, es)
        tot = sum(weights.values())

        def obj(cross, ia, ib, wa, za):
            lo = min(wa, tot - wa)
            return cross / lo if lo > 0 else None

        side = _heuristic_search(core_g, obj, weights, {}, cfg)
        if side is not None:
            best = make_cut(g, _unfold(side, host), ts)
        exact = False
    else:
        exact = True
    if leaf_cut is not None and (best is None or leaf_cut.sparsity < best.sparsity):
        best = make_cut(g, leaf_cut.side_a, ts, exact=exact)
    if best is None:
        raise CutError("no cut separates the terminals")
    return best


def _sparsest_by_terminal_splits(g, core, es, weights, host, ts) -> Optional[Cut]:
    """Enumerate weighted terminal splits, completing each with a min cut."""
    core_g = Graph(core, es)
    tv = [v for v in core if weights[v]]
    best_val, best_side = None, None
    t0 = tv[0]
    rest = tv[1:]
    total = sum(weights[v] for v in tv)
    for mask in range(1, 1 << len(rest)):
        a = [t for i, t in enumerate(rest) if (mask >> i) & 1]
        b = [t0] + [t for i, t in enumerate(rest) if not (mask >> i) & 1]
        wa = sum(weights[v] for v in a)
        lo = min(wa, total - wa)
        if lo == 0:
            continue
        val, side = min_cut_value(core_g, a, b)
        frac = Fraction(val, lo)
        if best_val is None or frac < best_val:
            best_val, best_side = frac, side
    if best_side is None:
        return None
    return make_cut(g, _unfold(best_side, host), ts, exact=True)


def min_conductance_cut(g: Graph, cfg: SolverConfig = SolverConfig()) -> Cut:
    """Cut minimizing crossing / min(|E(A)|, |E(B)|) over cuts with both sides non-empty in edges."""
    if g.m() < 2:
        raise CutError("no valid conductance cut: fewer than 2 edges")
    vs = [v for v in g.sorted_vertices() if g.degree(v) > 0]
    iso = [v for v in g.sorted_vertices() if g.degree(v) == 0]
    best = None
    if len(vs) >= 2 and _use_exact(cfg, len(vs)):
        tab = _Table(vs, g.edges)
        k = _ratio_argmin(tab.cross, np.minimum(tab.in_a, tab.in_b))
        if k is not None:
            best = make_cut(g, tab.side(k), exact=True)
    elif len(vs) >= 2:
        sub = g.induced(vs)

        def obj(cross, ia, ib, wa, za):
            lo = min(ia, ib)
            return cross / lo if lo > 0 else None

        side = _heuristic_search(sub, obj, {}, {}, cfg)
        if side is not None:
            best = make_cut(g, side)
    if best is None or best.conductance is None:
        raise CutError("no valid conductance cut")
    if iso:  # isolated vertices do not affect the value; keep them on side B
        best = make_cut(g, best.side_a, exact=best.exact)
    return best


def balanced_cut(g: Graph, s: Iterable[int], z_marks: Iterable[int],
                 cfg: SolverConfig = SolverConfig()) -> Cut:
    """Fewest-crossing cut (A,B) of s with min(|A∩Z|,|B∩Z|) >= gamma·|s∩Z|."""
    fs = g.check_subset(s)
    zs = frozenset(z_marks) & fs
    gamma = Fraction(cfg.gamma_balance)
    zt = len(zs)
    if zt <= cfg.balance_floor:
        raise CutError(f"|S∩Z| = {zt} does not exceed the balance floor {cfg.balance_floor}")
    need = math.ceil(gamma * zt)
    if need * 2 > zt:
        raise CutError(f"balance {gamma} infeasible for |S∩Z| = {zt}")
    sub = g.induced(fs)
    vs = sub.sorted_vertices()
    zw = {v: 1 for v in zs}
    if _use_exact(cfg, len(vs)):
        tab = _Table(vs, sub.edges, zw)
        ok = np.minimum(tab.w_a, tab.w_b) >= need
        if not ok.any():
            raise CutError("balance infeasible")
        cr = np.where(ok, tab.cross, np.iinfo(np.int32).max)
        k = int(np.argmin(cr))
        return make_cut(g, tab.side(k), zs, operand=fs, exact=True)

    def obj(cross, ia, ib, wa, za):
        lo = min(za, zt - za)
        if lo >= need:
            return float(cross)
        return float(cross) + 1e6 * (need - lo)  # steer toward feasibility

    side = _heuristic_search(sub, obj, {}, zw, cfg)
    if side is None:
        raise CutError("balance infeasible")
    side = _repair_balance(sub, set(side), zs, need)
    return make_cut(g, side, zs, operand=fs)


def _repair_balance(g: Graph, a: set, zs: FrozenSet[int], need: int) -> FrozenSet[int]:
    """Move Z vertices across until both sides hold at least ``need`` of Z."""
    adj = g.adj()
    for _ in range(len(zs) + 1):
        za = len(zs & a)
        zb = len(zs) - za
        if min(za, zb) >= need:
            break
        grow = za < zb
        pool = [v for v in zs if (v in a) != grow]

        def cost(v):
            na = sum(1 for y in adj[v] if y in a)
            return (len(adj[v]) - 2 * na if grow else 2 * na - len(adj[v]), v)

        v = min(pool, key=cost)
        if grow:
            a.add(v)
        else:
            a.remove(v)
    return frozenset(a)


# ---------------------------------------------------------------------------
# congestion-aware routing inside a cluster


@dataclass
class RoutingReport:
    paths: Dict[Tuple[int, int], List[Tuple[List[int], float]]]
    congestion: float
    feasible: bool
    cap: float


def route_demands_in_cluster(g: Graph, cluster: Iterable[int],
                             demands: Dict[Tuple[int, int], float],
                             cap: float = math.inf, chunks: int = 8, eps: float = 0.5) -> RoutingReport:
    """Fractionally route demands between boundary edges through g[cluster].

    Demand keys are indices into the sorted boundary edge list of the
    cluster. Each boundary edge e becomes a terminal t_e hanging off its
    inner endpoint; flow is split into chunks routed on shortest paths
    under multiplicatively growing edge lengths.
    """
    from .graph_core import subdivide_boundary

    fs = g.check_subset(cluster)
    h, ts, origin = subdivide_boundary(g, fs)
    tlist = sorted(ts)
    adj = h.adj()
    load: Dict[Tuple[int, int], float] = {}
    mult = h.edge_multiset()
    paths: Dict[Tuple[int, int], List[Tuple[List[int], float]]] = {}

    def length(u, v):
        e = (u, v) if u <= v else (v, u)
        return math.exp(eps * load.get(e, 0.0) / mult[e])

    for key in sorted(demands):
        i, j = key
        amount = demands[key]
        if amount <= 0:
            continue
        s, t = tlist[i], tlist[j]
        piece = amount / chunks
        for _ in range(chunks):
            p = _dijkstra(adj, s, t, length)
            if p is None:
                return RoutingReport(paths, math.inf, False, cap)
            for u, v in zip(p, p[1:]):
                e = (u, v) if u <= v else (v, u)
                load[e] = load.get(e, 0.0) + piece
            paths.setdefault(key, []).append((p, piece))
    cong = max((load[e] / mult[e] for e in load), default=0.0)
    return RoutingReport(paths, cong, cong <= cap + 1e-9, cap)


def _dijkstra(adj, s, t, length) -> Optional[List[int]]:
    dist = {s: 0.0}
    prev: Dict[int, int] = {}
    pq = [(0.0, s)]
    while pq:
        d, u = heapq.heappop(pq)
        if u == t:
            break
        if d > dist[u]:
            continue
        for v in set(adj[u]):
            nd = d + length(u, v)
            if nd < dist.get(v, math.inf) - 1e-15:
                dist[v] = nd
                prev[v] = u
                heapq.heappush(pq, (nd, v))
    if t not in dist:
        return None
    path = [t]
    while path[-1] != s:
        path.append(prev[path[-1]])
    return path[::-1]


def cut_stats(g: Graph, a: Iterable[int]) -> Tuple[int, int, int]:
    """(crossing, |E(A)|, |E(B)|) for a cut of V(g)."""
    fa = frozenset(a)
    ia = count_inner(g, fa)
    ib = count_inner(g, g.vertices - fa)
    return g.m() - ia - ib, ia, ib

"""Multigraph type, boundary/contraction algebra, and graph I/O."""
from __future__ import annotations

from collections import Counter
from typing import Dict, FrozenSet, Iterable, List, Optional, Sequence, Tuple

Edge = Tuple[int, int]


class GraphError(ValueError):
    """Domain error: unknown vertex, self-loop, bad partition, malformed input."""


class ParseError(GraphError):
    def __init__(self, line_no: int, msg: str):
        super().__init__(f"line {line_no}: {msg}")
        self.line_no = line_no


def _norm(u: int, v: int) -> Edge:
    return (u, v) if u <= v else (v, u)


class Graph:
    """Undirected multigraph over stable integer vertex ids.

    Edges are stored as a sorted list of normalized pairs, so parallel edges
    appear with their multiplicity. Instances are treated as immutable.
    """

    __slots__ = ("_vertices", "_edges", "terminals", "_adj", "_members")

    def __init__(
        self,
        vertices: Iterable[int],
        edges: Iterable[Sequence[int]] = (),
        terminals: Iterable[int] = (),
        members: Optional[Dict[int, Tuple[int, ...]]] = None,
    ):
        vs = frozenset(int(v) for v in vertices)
        es: List[Edge] = []
        for e in edges:
            u, v = int(e[0]), int(e[1])
            if u == v:
                raise GraphError(f"self-loop at vertex {u}")
            if u not in vs or v not in vs:
                raise GraphError(f"edge ({u},{v}) has unknown endpoint")
            es.append(_norm(u, v))
        es.sort()
        ts = frozenset(int(t) for t in terminals)
        if not ts <= vs:
            raise GraphError("terminal marks must be vertices")
        self._vertices = vs
        self._edges = tuple(es)
        self.terminals = ts
        self._adj: Optional[Dict[int, List[int]]] = None
        # contracted super-nodes remember which input vertices they stand for
        self._members = members

    # -- basic accessors -------------------------------------------------
    @property
    def vertices(self) -> FrozenSet[int]:
        return self._vertices

    @property
    def edges(self) -> Tuple[Edge, ...]:
        return self._edges

    @property
    def members(self) -> Dict[int, Tuple[int, ...]]:
        if self._members is None:
            return {v: (v,) for v in self._vertices}
        return self._members

    def n(self) -> int:
        return len(self._vertices)

    def m(self) -> int:
        return len(self._edges)

    def sorted_vertices(self) -> List[int]:
        return sorted(self._vertices)

    def adj(self) -> Dict[int, List[int]]:
        """Neighbour lists with multiplicity."""
        if self._adj is None:
            a: Dict[int, List[int]] = {v: [] for v in self._vertices}
            for u, v in self._edges:
                a[u].append(v)
                a[v].append(u)
            self._adj = a
        return self._adj

    def neighbors(self, v: int) -> List[int]:
        """Distinct neighbours of v, sorted."""
        return sorted(set(self.adj()[v]))

    def degree(self, v: int) -> int:
        return len(self.adj()[v])

    def max_degree(self) -> int:
        return max((len(x) for x in self.adj().values()), default=0)

    def edge_multiset(self) -> Counter:
        return Counter(self._edges)

    def simple_edges(self) -> List[Edge]:
        return sorted(set(self._edges))

    def has_edge(self, u: int, v: int) -> bool:
        return v in self.adj().get(u, ())

    def check_subset(self, s: Iterable[int]) -> FrozenSet[int]:
        fs = frozenset(s)
        bad = fs - self._vertices
        if bad:
            raise GraphError(f"unknown vertex ids: {sorted(bad)[:5]}")
        return fs

    # -- derived graphs --------------------------------------------------
    def induced(self, s: Iterable[int], terminals: Optional[Iterable[int]] = None) -> "Graph":
        fs = self.check_subset(s)
        es = [e for e in self._edges if e[0] in fs and e[1] in fs]
        ts = self.terminals & fs if terminals is None else terminals
        return Graph(fs, es, ts)

    def remove_vertices(self, s: Iterable[int]) -> "Graph":
        return self.induced(self._vertices - frozenset(s))

    def with_terminals(self, t: Iterable[int]) -> "Graph":
        return Graph(self._vertices, self._edges, t, self._members)

    def components(self) -> List[FrozenSet[int]]:
        """Connected components, ordered by smallest vertex id."""
        adj = self.adj()
        seen = set()
        comps = []
        for s in self.sorted_vertices():
            if s in seen:
                continue
            seen.add(s)
            stack = [s]
            comp = [s]
            while stack:
                x = stack.pop()
                for y in adj[x]:
                    if y not in seen:
                        seen.add(y)
                        stack.append(y)
                        comp.append(y)
            comps.append(frozenset(comp))
        return comps

    def is_connected(self) -> bool:
        return self.n() <= 1 or len(self.components()) == 1

    def relabel(self, mapping: Dict[int, int]) -> "Graph":
        return Graph(
            (mapping[v] for v in self._vertices),
            ((mapping[u], mapping[v]) for u, v in self._edges),
            (mapping[t] for t in self.terminals),
        )

    def __eq__(self, other) -> bool:
        if not isinstance(other, Graph):
            return NotImplemented
        return (
            self._vertices == other._vertices
            and self._edges == other._edges
            and self.terminals == other.terminals
        )

    def __hash__(self):
        return hash((self._vertices, self._edges, self.terminals))

    def __repr__(self) -> str:
        return f"Graph(n={self.n()}, m={self.m()}, |T|={len(self.terminals)})"


# ---------------------------------------------------------------------------
# edge-set helpers


def out_edges(g: Graph, s: Iterable[int]) -> List[Edge]:
    """Edges with exactly one endpoint in s, with multiplicity."""
    fs = g.check_subset(s)
    return [e for e in g.edges if (e[0] in fs) != (e[1] in fs)]


def inner_edges(g: Graph, s: Iterable[int]) -> List[Edge]:
    fs = g.check_subset(s)
    return [e for e in g.edges if e[0] in fs and e[1] in fs]


def edges_between(g: Graph, a: Iterable[int], b: Iterable[int]) -> List[Edge]:
    fa, fb = g.check_subset(a), g.check_subset(b)
    return [e for e in g.edges if (e[0] in fa and e[1] in fb) or (e[0] in fb and e[1] in fa)]


def count_out(g: Graph, s: Iterable[int]) -> int:
    fs = frozenset(s)
    return sum(1 for u, v in g.edges if (u in fs) != (v in fs))


def count_inner(g: Graph, s: Iterable[int]) -> int:
    fs = frozenset(s)
    return sum(1 for u, v in g.edges if u in fs and v in fs)


# ---------------------------------------------------------------------------
# contraction and subdivision

MODE_THM1 = "thm1"
MODE_THM2 = "thm2"


def check_partition(g: Graph, clusters: Sequence[Iterable[int]]) -> List[FrozenSet[int]]:
    parts = [frozenset(c) for c in clusters]
    seen: set = set()
    for p in parts:
        if not p:
            raise GraphError("empty cluster")
        if p & seen:
            raise GraphError("clusters overlap")
        seen |= p
    if seen != set(g.vertices):
        raise GraphError("clusters do not cover V(g)")
    return parts


def contract_clustering(g: Graph, clusters: Sequence[Iterable[int]], mode: str = MODE_THM1) -> Graph:
    """Collapse each cluster to a super-node; self-loops dropped, parallels kept.

    Super-node ids are cluster indices; ``members`` maps them back to g's ids.
    In thm2 mode every cluster must induce a connected subgraph.
    """
    parts = check_partition(g, clusters)
    if mode == MODE_THM2:
        for p in parts:
            if not g.induced(p).is_connected():
                raise GraphError(f"cluster {sorted(p)[:5]} is not connected")
    elif mode != MODE_THM1:
        raise GraphError(f"unknown contraction mode {mode!r}")
    where = {}
    for i, p in enumerate(parts):
        for v in p:
            where[v] = i
    es = [(where[u], where[v]) for u, v in g.edges if where[u] != where[v]]
    ts = {where[t] for t in g.terminals}
    members = {i: tuple(sorted(p)) for i, p in enumerate(parts)}
    return Graph(range(len(parts)), es, ts, members)


def fresh_ids(g: Graph, count: int) -> List[int]:
    start = max(g.vertices, default=-1) + 1
    return list(range(start, start + count))


def subdivide_boundary(g: Graph, s: Iterable[int]) -> Tuple[Graph, FrozenSet[int], Dict[int, Edge]]:
    """Graph induced by s plus one new vertex per boundary edge.

    Returns (H, T_S, origin) where T_S holds the subdivision vertices (also set
    as H's terminal marks) and origin maps each of them to its g-edge.
    """
    fs = g.check_subset(s)
    boundary = out_edges(g, fs)
    new = fresh_ids(g, len(boundary))
    es = inner_edges(g, fs)
    origin: Dict[int, Edge] = {}
    for t, (u, v) in zip(new, boundary):
        inside = u if u in fs else v
        es.append((inside, t))
        origin[t] = (u, v)
    ts = frozenset(new)
    return Graph(fs | ts, es, ts), ts, origin


# ---------------------------------------------------------------------------
# greedy balanced split


def balanced_integer_partition(xs: Sequence[int]) -> Tuple[List[int], List[int]]:
    """Split indices so both sides carry at least a third of the total.

    Sorted descending, each item goes to A when sum(A) <= sum(B), else to B.
    Requires every item to be at most two thirds of the total.
    """
    if any(x < 0 for x in xs):
        raise GraphError("entries must be non-negative")
    total = sum(xs)
    for i, x in enumerate(xs):
        if 3 * x > 2 * total:
            raise GraphError(f"entry {i} = {x} exceeds 2N/3 with N = {total}")
    order = sorted(range(len(xs)), key=lambda i: (-xs[i], i))
    a: List[int] = []
    b: List[int] = []
    sa = sb = 0
    for i in order:
        if sa <= sb:
            a.append(i)
            sa += xs[i]
        else:
            b.append(i)
            sb += xs[i]
    return a, b


# ---------------------------------------------------------------------------
# I/O


def parse_graph(data, fmt: str = "edgelist", zero_indexed: bool = False) -> Graph:
    """Parse DIMACS (``p edge n m`` / ``e u v``, 1-indexed) or a whitespace edge list.

    Edge lists may start with a single ``n`` header line; without it the
    vertex set is the set of endpoints. Vertex ids are kept as written
    (shifted to 0-based for DIMACS, and for edge lists unless zero_indexed).
    """
    text = data.decode() if isinstance(data, (bytes, bytearray)) else str(data)
    if fmt == "dimacs":
        return _parse_dimacs(text)
    if fmt == "edgelist":
        return _parse_edgelist(text, zero_indexed)
    raise GraphError(f"unknown format {fmt!r}")


def _parse_dimacs(text: str) -> Graph:
    n = None
    es = []
    for no, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line[0] == "c":
            continue
        tok = line.split()
        if tok[0] == "p":
            if len(tok) != 4 or n is not None:
                raise ParseError(no, "bad problem line")
            try:
                n = int(tok[2])
            except ValueError:
                raise ParseError(no, "vertex count is not an integer") from None
        elif tok[0] == "e":
            if n is None:
                raise ParseError(no, "edge before problem line")
            if len(tok) != 3:
                raise ParseError(no, "edge line needs two endpoints")
            try:
                u, v = int(tok[1]), int(tok[2])
            except ValueError:
                raise ParseError(no, "non-integer endpoint") from None
            if not (1 <= u <= n and 1 <= v <= n):
                raise ParseError(no, "endpoint out of range")
            if u == v:
                raise ParseError(no, "self-loop")
            es.append((u - 1, v - 1))
        else:
            raise ParseError(no, f"unknown line type {tok[0]!r}")
    if n is None:
        raise ParseError(0, "missing problem line")
    return Graph(range(n), es)


def _parse_edgelist(text: str, zero_indexed: bool) -> Graph:
    shift = 0 if zero_indexed else 1
    n = None
    es = []
    vs = set()
    for no, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        tok = line.split()
        try:
            ints = [int(t) for t in tok]
        except ValueError:
            raise ParseError(no, "non-integer token") from None
        if len(ints) == 1 and n is None and not es:
            n = ints[0]
            continue
        if len(ints) != 2:
            raise ParseError(no, "expected two endpoints")
        u, v = ints[0] - shift, ints[1] - shift
        if u < 0 or v < 0:
            raise ParseError(no, "negative vertex id")
        if u == v:
            raise ParseError(no, "self-loop")
        if n is not None and (u >= n or v >= n):
            raise ParseError(no, "endpoint out of range")
        es.append((u, v))
        vs.update((u, v))
    if n is not None:
        vs.update(range(n))
    return Graph(vs, es)


def write_graph(g: Graph, fmt: str = "edgelist", zero_indexed: bool = False) -> bytes:
    """Deterministic writer. Ids must be 0..n-1 for DIMACS."""
    if fmt == "dimacs":
        if g.vertices != frozenset(range(g.n())):
            raise GraphError("DIMACS output needs vertex ids 0..n-1")
        lines = [f"p edge {g.n()} {g.m()}"]
        lines += [f"e {u + 1} {v + 1}" for u, v in g.edges]
    elif fmt == "edgelist":
        shift = 0 if zero_indexed else 1
        top = max(g.vertices, default=-1) + 1
        lines = [str(top)]
        if g.vertices != frozenset(range(top)):
            raise GraphError("edge list output needs vertex ids 0..n-1")
        lines += [f"{u + shift} {v + shift}" for u, v in g.edges]
    else:
        raise GraphError(f"unknown format {fmt!r}")
    return ("\n".join(lines) + "\n").encode()


# ---------------------------------------------------------------------------
# small constructors used by tests, demos, and the CLI


def path_graph(n: int) -> Graph:
    return Graph(range(n), [(i, i + 1) for i in range(n - 1)])


def cycle_graph(n: int) -> Graph:
    return Graph(range(n), [(i, (i + 1) % n) for i in range(n)])


def complete_graph(n: int) -> Graph:
    return Graph(range(n), [(i, j) for i in range(n) for j in range(i + 1, n)])


def grid_graph(rows: int, cols: Optional[int] = None) -> Graph:
    cols = rows if cols is None else cols
    es = []
    for r in range(rows):
        for c in range(cols):
            v = r * cols + c
            if c + 1 < cols:
                es.append((v, v + 1))
            if r + 1 < rows:
                es.append((v, v + cols))
    return Graph(range(rows * cols), es)


def disjoint_union(*gs: Graph) -> Graph:
    vs: List[int] = []
    es: List[Edge] = []
    off = 0
    for g in gs:
        mp = {v: i + off for i, v in enumerate(g.sorted_vertices())}
        vs.extend(mp.values())
        es.extend((mp[u], mp[v]) for u, v in g.edges)
        off += g.n()
    return Graph(vs, es)


def from_networkx(nxg) -> Graph:
    return Graph(nxg.nodes(), nxg.edges())


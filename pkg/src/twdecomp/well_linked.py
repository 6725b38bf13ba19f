"""Well-linkedness checks, the well-linked decomposition, and well-linked set extraction."""
from __future__ import annotations

import itertools
import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, FrozenSet, Iterable, List, Optional, Tuple

from .cuts_flows import Cut, CutError, SolverConfig, make_cut, max_flow, min_cut_value, sparsest_cut
from .graph_core import Graph, GraphError, count_inner, count_out, subdivide_boundary

EDGE = "edge-well-linked"
GOOD = "alpha-good"
NODE = "node-well-linked"


class PreconditionError(GraphError):
    pass


@dataclass
class CheckResult:
    passed: bool
    cut: Optional[Cut] = None
    exact: bool = True
    value: Optional[Fraction] = None  # best sparsity seen

    def __bool__(self):
        return self.passed


@dataclass
class WellLinkedCertificate:
    terminal_set: FrozenSet[int]
    alpha: Fraction
    kind: str = EDGE
    mode: str = "exhaustive"  # exhaustive | sampled | heuristic
    witness: dict = field(default_factory=dict)
    host: Optional[FrozenSet[int]] = None  # vertex set of the graph it refers to

    def replay(self, g: Graph, cfg: SolverConfig = SolverConfig()) -> bool:
        """Re-run the recorded check against g (restricted to ``host`` if set)."""
        h = g.induced(self.host) if self.host is not None else g
        if not self.terminal_set <= h.vertices or not (0 < self.alpha <= 1):
            return False
        if self.mode == "sampled":
            for a_side, b_side, value in self.witness.get("samples", []):
                got, _ = min_cut_value(h, a_side, b_side)
                if got != value or Fraction(value) < self.alpha * min(len(a_side), len(b_side)):
                    return False
            return True
        if self.kind == NODE:
            return bool(verify_node_well_linked(h, self.terminal_set))
        res = check_alpha_well_linked(h, self.terminal_set, self.alpha, cfg)
        return res.passed and (res.exact or self.mode == "heuristic")

    def to_json(self) -> dict:
        wit = dict(self.witness)
        if "samples" in wit:
            wit["samples"] = [[sorted(a), sorted(b), v] for a, b, v in wit["samples"]]
        return {
            "terminals": sorted(self.terminal_set),
            "alpha": str(self.alpha),
            "kind": self.kind,
            "mode": self.mode,
            "host": sorted(self.host) if self.host is not None else None,
            "witness": wit,
        }

    @staticmethod
    def from_json(d: dict) -> "WellLinkedCertificate":
        wit = dict(d.get("witness", {}))
        if "samples" in wit:
            wit["samples"] = [(frozenset(a), frozenset(b), v) for a, b, v in wit["samples"]]
        host = d.get("host")
        return WellLinkedCertificate(frozenset(d["terminals"]), Fraction(d["alpha"]), d["kind"],
                                     d["mode"], wit, frozenset(host) if host is not None else None)


# ---------------------------------------------------------------------------
# checks


def check_alpha_well_linked(g: Graph, t: Iterable[int], alpha, cfg: SolverConfig = SolverConfig()) -> CheckResult:
    """Is every cut at least alpha times its smaller terminal side?

    A returned cut always genuinely violates the inequality. ``exact`` is
    False when only heuristic search was possible, in which case a pass is
    not a proof.
    """
    ts = g.check_subset(t)
    alpha = Fraction(alpha)
    if not ts:
        raise GraphError("terminal set must be non-empty")
    if len(ts) < 2:
        return CheckResult(True, None, True, None)
    if alpha > 1:
        # leaf folding relies on alpha <= 1; fall back to full enumeration
        return _check_unfolded(g, ts, alpha, cfg)
    try:
        cut = sparsest_cut(g, ts, cfg)
    except CutError:
        return CheckResult(True, None, True, None)
    if cut.sparsity < alpha:
        return CheckResult(False, cut, cut.exact, cut.sparsity)
    return CheckResult(True, None, cut.exact, cut.sparsity)


def _check_unfolded(g: Graph, ts, alpha, cfg) -> CheckResult:
    vs = g.sorted_vertices()
    if len(vs) > cfg.exact_limit:
        raise CutError("alpha > 1 checks are exhaustive only")
    first, rest = vs[0], vs[1:]
    for r in range(0, len(rest) + 1):
        for comb in itertools.combinations(rest, r):
            a = set(comb)
            c = make_cut(g, a, ts, exact=True)
            if c.sparsity is not None and c.sparsity < alpha:
                return CheckResult(False, c, True, c.sparsity)
    return CheckResult(True, None, True, None)


def check_alpha_good(g: Graph, s: Iterable[int], alpha, cfg: SolverConfig = SolverConfig()) -> CheckResult:
    """alpha-goodness of s: its boundary-edge terminals are alpha-well-linked in the subdivided graph.

    A violating cut is reported on the subdivided graph's vertex ids.
    """
    fs = g.check_subset(s)
    h, ts, _ = subdivide_boundary(g, fs)
    if len(ts) <= 1:
        return CheckResult(True, None, True, None)
    return check_alpha_well_linked(h, ts, alpha, cfg)


def check_alpha_good_direct(g: Graph, s: Iterable[int], alpha) -> CheckResult:
    """Brute-force alpha-goodness straight from the partition definition (small s only).

    For every partition (A, B) of s: |E(A,B)| >= alpha·min(|out(A)∩out(S)|, |out(B)∩out(S)|).
    """
    fs = sorted(g.check_subset(s))
    alpha = Fraction(alpha)
    full = frozenset(fs)
    bnd = {v: 0 for v in fs}
    for u, v in g.edges:
        if (u in full) != (v in full):
            bnd[u if u in full else v] += 1
    first, rest = fs[0], fs[1:]
    for r in range(1, len(rest) + 1):
        for comb in itertools.combinations(rest, r):
            a = frozenset(comb)
            b = full - a
            cross = sum(1 for u, v in g.edges if (u in a and v in b) or (u in b and v in a))
            ta = sum(bnd[v] for v in a)
            tb = sum(bnd[v] for v in b)
            if cross < alpha * min(ta, tb):
                return CheckResult(False, make_cut(g.induced(full), a, exact=True), True, None)
    return CheckResult(True, None, True, None)


# ---------------------------------------------------------------------------
# the decomposition


@dataclass
class WLDecomposition:
    parts: List[FrozenSet[int]]
    boundary_sum: int
    k_prime: int
    bound: float
    alpha: Fraction
    precondition_ok: bool
    splits: List[dict] = field(default_factory=list)
    verified: List[Optional[bool]] = field(default_factory=list)


def wl_boundary_bound(k_prime: int, alpha, arv) -> float:
    """k'·(1 + 16·alpha·arv·log2 k')."""
    if k_prime <= 1:
        return float(k_prime)
    return k_prime * (1 + 16 * float(alpha) * float(arv) * math.log2(k_prime))


def wl_alpha_limit(k_prime: int, arv) -> float:
    """Strict upper limit on alpha for the boundary-sum guarantee: 1/(8·arv·log2 k')."""
    if k_prime <= 1:
        return math.inf
    return 1.0 / (8 * float(arv) * math.log2(k_prime))


def well_linked_decomposition(g: Graph, s: Iterable[int], alpha, cfg: SolverConfig = SolverConfig(),
                              strict: bool = True, verify: bool = True) -> WLDecomposition:
    """Split s into alpha-good parts by repeatedly cutting along sparse cuts.

    Starts from the connected components of g[s]; any part whose subdivided
    instance has a cut of sparsity below alpha·arv is split along it.
    With ``strict`` the alpha precondition of the boundary-sum guarantee is
    enforced, otherwise only reported.
    """
    fs = g.check_subset(s)
    alpha = Fraction(alpha)
    arv = Fraction(cfg.arv_factor)
    k_prime = count_out(g, fs)
    pre_ok = float(alpha) < wl_alpha_limit(k_prime, arv)
    if strict and not pre_ok:
        raise PreconditionError(
            f"alpha = {alpha} must be below 1/(8·{arv}·log2 {k_prime}) = {wl_alpha_limit(k_prime, arv):.4g}")
    threshold = alpha * arv
    todo = list(g.induced(fs).components())
    done: List[FrozenSet[int]] = []
    splits = []
    while todo:
        r = todo.pop()
        h, ts, _ = subdivide_boundary(g, r)
        if len(ts) < 2 or len(r) < 2:
            done.append(r)
            continue
        cut = sparsest_cut(h, ts, cfg)
        if cut.sparsity < threshold:
            a = cut.side_a & r
            b = cut.side_b & r
            if a and b:
                splits.append({"part": len(r), "crossing": cut.crossing,
                               "sparsity": str(cut.sparsity), "sides": (len(a), len(b))})
                todo.append(b)
                todo.append(a)
                continue
        done.append(r)
    done.sort(key=lambda p: min(p))
    total = sum(count_out(g, p) for p in done)
    bound = wl_boundary_bound(k_prime, alpha, arv)
    if pre_ok:
        assert total <= bound + 1e-9, (total, bound)
    verified: List[Optional[bool]] = []
    if verify:
        for p in done:
            res = check_alpha_good(g, p, alpha, cfg)
            verified.append(res.passed if res.exact else None)
    return WLDecomposition(done, total, k_prime, bound, alpha, pre_ok, splits, verified)


# ---------------------------------------------------------------------------
# well-linked set extraction


def _spread_subset(g: Graph, xs: FrozenSet[int], size: int) -> FrozenSet[int]:
    """Farthest-point selection of ``size`` members of xs by BFS distance."""
    from collections import deque

    adj = g.adj()
    chosen = [min(xs)]
    dist = {v: math.inf for v in g.vertices}

    def relax(src):
        d = {src: 0}
        q = deque([src])
        while q:
            x = q.popleft()
            for y in adj[x]:
                if y not in d:
                    d[y] = d[x] + 1
                    q.append(y)
        for v in g.vertices:
            dist[v] = min(dist[v], d.get(v, math.inf))

    relax(chosen[0])
    while len(chosen) < size:
        v = max(sorted(xs - set(chosen)), key=lambda x: dist[x])
        chosen.append(v)
        relax(v)
    return frozenset(chosen)


def exact_wl_alpha(g: Graph, xs: FrozenSet[int], cfg: SolverConfig) -> Optional[Fraction]:
    """min(1, Φ(g, xs)) when it can be computed exactly, else None."""
    if len(xs) < 2:
        return Fraction(1)
    try:
        cut = sparsest_cut(g, xs, cfg.with_(mode="auto"))
    except CutError:
        return Fraction(1)
    if not cut.exact:
        return None
    return min(Fraction(1), cut.sparsity)


def find_well_linked_set(g: Graph, cfg: Optional[SolverConfig] = None, alpha0=Fraction(1),
                         shrink_to_exact: bool = True, samples: int = 64) -> WellLinkedCertificate:
    """Shrink X = V(g) along sparse cuts until no cut is sparser than the current target.

    The target starts at alpha0 and decays by (1 - 1/log2 n) per shrink so
    the loop terminates. The returned alpha is measured, not assumed: an
    exact sparsest-cut value when affordable (optionally thinning X to make
    it so), otherwise the minimum over sampled terminal splits.
    """
    cfg = cfg or SolverConfig()
    if g.n() < 3:
        return WellLinkedCertificate(frozenset(g.vertices), Fraction(1), EDGE, "exhaustive",
                                     {"reason": "degenerate"}, frozenset(g.vertices))
    if not g.is_connected():
        raise GraphError("find_well_linked_set needs a connected graph")
    x = frozenset(g.vertices)
    decay = 1 - 1 / math.log2(max(g.n(), 3))
    depth = 0
    trace = []
    while len(x) > 2:
        target = float(alpha0) * decay ** depth
        cut = sparsest_cut(g, x, cfg)
        trace.append({"size": len(x), "sparsity": str(cut.sparsity), "target": round(target, 6)})
        if cut.sparsity >= target:
            break
        xa, xb = x & cut.side_a, x & cut.side_b
        if len(xa) != len(xb):
            x = xa if len(xa) > len(xb) else xb
        else:
            ea, eb = count_inner(g, cut.side_a), count_inner(g, cut.side_b)
            if ea != eb:
                x = xa if ea > eb else xb
            else:
                x = xa if min(xa) < min(xb) else xb
        depth += 1
    exact_alpha = exact_wl_alpha(g, x, cfg)
    if exact_alpha is None and shrink_to_exact:
        x = _spread_subset(g, x, cfg.terminal_enum_limit)
        exact_alpha = exact_wl_alpha(g, x, cfg)
    if exact_alpha is not None:
        return WellLinkedCertificate(x, exact_alpha, EDGE, "exhaustive",
                                     {"trace": trace}, frozenset(g.vertices))
    alpha, pairs = sampled_alpha(g, x, samples, cfg.seed)
    return WellLinkedCertificate(x, alpha, EDGE, "sampled", {"trace": trace, "samples": pairs},
                                 frozenset(g.vertices))


def sampled_alpha(g: Graph, xs: FrozenSet[int], samples: int, seed: int):
    """Minimum of mincut/min-side over seeded random terminal splits (an upper estimate of alpha)."""
    rng = random.Random(seed)
    xl = sorted(xs)
    best = Fraction(1)
    pairs = []
    for _ in range(samples):
        k = rng.randint(1, len(xl) // 2)
        pick = rng.sample(xl, 2 * k) if rng.random() < 0.5 else rng.sample(xl, len(xl))
        a = frozenset(pick[:k])
        b = frozenset(pick[k:])
        val, _ = min_cut_value(g, a, b)
        pairs.append((a, b, val))
        best = min(best, Fraction(val, min(len(a), len(b))))
    return best, pairs


# ---------------------------------------------------------------------------
# node-well-linkedness


def verify_node_well_linked(g: Graph, x: Iterable[int], sample: Optional[int] = None,
                            seed: int = 0, exhaustive_limit: int = 8) -> CheckResult:
    """All equal-size pairs (T1, T2) of x must be joined by node-disjoint paths.

    Exhaustive up to ``exhaustive_limit`` vertices (the pair count grows
    like C(2|x|, |x|)), otherwise ``sample`` seeded pairs; a sampled pass
    is evidence, not proof.
    """
    xs = sorted(g.check_subset(x))
    exhaustive = len(xs) <= exhaustive_limit and sample is None
    if exhaustive:
        pairs = _all_pairs(xs)
    else:
        rng = random.Random(seed)
        pairs = []
        for _ in range(sample or 200):
            k = rng.randint(1, max(1, len(xs) // 2))
            pairs.append((frozenset(rng.sample(xs, k)), frozenset(rng.sample(xs, k))))
    for t1, t2 in pairs:
        res = max_flow(g, t1, t2, "vertex")
        if res.value < len(t1):
            return CheckResult(False, None, exhaustive, Fraction(res.value, len(t1)))
    return CheckResult(True, None, exhaustive, None)


def _all_pairs(xs):
    """Equal-size pairs up to symmetry; supersets of a linked pair are still checked."""
    n = len(xs)
    seen = set()
    for k in range(1, n + 1):
        for t1 in itertools.combinations(xs, k):
            for t2 in itertools.combinations(xs, k):
                key = (t1, t2) if t1 <= t2 else (t2, t1)
                if key in seen:
                    continue
                seen.add(key)
                yield frozenset(t1), frozenset(t2)

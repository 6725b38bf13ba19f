"""End-to-end pipelines: partition a graph into h disjoint subgraphs of treewidth >= r.

Both pipelines keep a partition of the working graph into acceptable
clusters and iterate on the contracted graph. Every iteration either
returns the subgraphs or a new clustering with strictly fewer contracted
edges (the potential phi). Constants default to desk-scale values; every
returned subgraph is checked independently, so a run never reports an
unverified success.
"""
from __future__ import annotations

import json
import math
import random
import time
from collections import deque
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from typing import Dict, FrozenSet, List, Optional, Sequence, Tuple

from .conductance import conductance_threshold, decompose_high_conductance, trim_after_removal
from .cuts_flows import CutError, SolverConfig, balanced_cut, sparsest_cut
from .expander import (ExpanderError, RoutingError, build_small_expander, edge_coloring_matchings,
                       measure_expansion, reduce_degree, route_matchings_short_paths, split_vertices)
from .graph_core import (MODE_THM1, MODE_THM2, Graph, GraphError, contract_clustering, count_inner,
                         count_out, out_edges)
from .treewidth import EXACT_LIMIT, exact_treewidth, minor_lower_bound, treewidth_at_least, tw_upper_bound
from .treewidth import tw_lower_bound_from_well_linked
from .well_linked import (PreconditionError, WellLinkedCertificate, check_alpha_good, exact_wl_alpha,
                          find_well_linked_set, sampled_alpha, well_linked_decomposition)


class ParameterError(GraphError):
    pass


class PipelineError(GraphError):
    def __init__(self, msg: str, trace: Optional[dict] = None):
        super().__init__(msg)
        self.trace = trace or {}


@dataclass(frozen=True)
class PipelineConfig:
    solver: SolverConfig = SolverConfig()
    constants: str = "desk"  # desk | asymptotic
    r_prime: Optional[int] = None
    r_double_prime: Optional[int] = None
    case1_rule: str = "beta"  # beta: n >= beta·k^2 | asymptotic: n >= k^5
    beta: Fraction = Fraction(8)
    alpha_wl: Optional[Fraction] = None
    gamma_thm2: Optional[Fraction] = None
    degree_target: Optional[int] = None  # None: ceil(log2(tw lower bound)^3)
    cmg_rounds: Optional[int] = None
    c_len: float = 4.0
    c_cong: float = 4.0
    partition_retries: int = 200
    embed_retries: int = 4
    feasibility_slack: Fraction = Fraction(1)
    max_iterations: Optional[int] = None
    seed: int = 0

    def with_(self, **kw) -> "PipelineConfig":
        d = {f: getattr(self, f) for f in self.__dataclass_fields__}
        d.update(kw)
        return PipelineConfig(**d)

    def to_json(self) -> dict:
        d = {}
        for f in self.__dataclass_fields__:
            v = getattr(self, f)
            if f == "solver":
                v = {k: (str(x) if isinstance(x, Fraction) else x) for k, x in asdict(v).items()}
            elif isinstance(v, Fraction):
                v = str(v)
            d[f] = v
        return d

    @staticmethod
    def from_json(d: dict) -> "PipelineConfig":
        """Inverse of to_json; missing keys keep their defaults, unknown keys are rejected."""
        known = PipelineConfig.__dataclass_fields__
        bad = sorted(set(d) - set(known))
        if bad:
            raise ValueError(f"unknown config keys: {bad}")
        kw = {}
        for f, v in d.items():
            if f == "solver":
                sk = SolverConfig.__dataclass_fields__
                extra = sorted(set(v) - set(sk))
                if extra:
                    raise ValueError(f"unknown solver keys: {extra}")
                v = SolverConfig(**{k: (Fraction(x) if k in ("arv_factor", "gamma_balance") else x)
                                    for k, x in v.items()})
            elif f in ("beta", "alpha_wl", "gamma_thm2", "feasibility_slack") and v is not None:
                v = Fraction(v)
            kw[f] = v
        return PipelineConfig(**kw)


@dataclass
class Params:
    """Constants derived for one run from (G', T, Δ, h, r) and the config."""
    k: int
    alpha_star: Fraction
    alpha_star_exact: bool
    delta: int
    h: int
    r: int
    r_prime: int
    r_double_prime: int
    alpha_wl: Fraction
    gamma_thm2: Fraction
    arv: Fraction

    def to_json(self) -> dict:
        return {k: (str(v) if isinstance(v, Fraction) else v) for k, v in asdict(self).items()}


def _log2(x: float) -> float:
    return math.log2(max(x, 2))


def derive_params(theorem: int, k: int, alpha_star, exact: bool, delta: int, h: int, r: int,
                  cfg: PipelineConfig) -> Params:
    arv = Fraction(cfg.solver.arv_factor)
    alpha_wl = cfg.alpha_wl
    if alpha_wl is None:
        alpha_wl = (1 / (256 * arv * Fraction(_log2(k)))).limit_denominator(10**9)
    if cfg.r_prime is not None:
        rp = cfg.r_prime
    elif cfg.constants == "asymptotic":
        if theorem == 1:
            rp = math.ceil(delta ** 2 * r * _log2(k) ** 11)
        else:
            rp = int(2 ** 20 * r * delta ** 2 * h * arv)
    elif theorem == 1:
        rp = max(delta + 1, 2 * delta * (r + 1))
    else:
        rp = delta + 1  # smallest value keeping singletons acceptable
    rpp = cfg.r_double_prime if cfg.r_double_prime is not None else max(4, 2 * (r + 1))
    if cfg.gamma_thm2 is not None:
        gamma = Fraction(cfg.gamma_thm2)
    elif cfg.constants == "asymptotic":
        gamma = Fraction(6 * delta ** 2 * r, rp)
    else:
        gamma = Fraction(1, 4)
    return Params(k, Fraction(alpha_star), exact, delta, h, r, rp, rpp, Fraction(alpha_wl), gamma, arv)


# ---------------------------------------------------------------------------
# certificates


@dataclass
class SubgraphCertificate:
    vertices: FrozenSet[int]
    r: int
    well_linked: Optional[WellLinkedCertificate]
    corollary_bound: int
    tw_holds: bool
    tw_method: str
    source: str = ""

    def replay(self, g: Graph, cfg: SolverConfig = SolverConfig()) -> Optional[str]:
        """None when the certificate still holds on g, else the reason it fails."""
        if not self.vertices <= g.vertices:
            return "vertices missing from graph"
        sub = g.induced(self.vertices)
        if self.well_linked is not None:
            if self.well_linked.host is not None and self.well_linked.host != self.vertices:
                return "well-linked certificate refers to another vertex set"
            if not self.well_linked.replay(sub, cfg):
                return "well-linked certificate does not replay"
            cb = _corollary(self.well_linked, sub)
            if cb != self.corollary_bound:
                return f"corollary bound {self.corollary_bound} does not recompute ({cb})"
        holds, method = treewidth_at_least(sub, self.r)
        if self.tw_holds and not holds:
            return f"treewidth >= {self.r} not confirmed ({method})"
        if not (self.tw_holds or self.corollary_bound >= self.r):
            return "no bound reaches r"
        return None

    def to_json(self) -> dict:
        return {
            "vertices": sorted(self.vertices),
            "r": self.r,
            "well_linked": self.well_linked.to_json() if self.well_linked else None,
            "corollary_bound": self.corollary_bound,
            "tw_holds": self.tw_holds,
            "tw_method": self.tw_method,
            "source": self.source,
        }

    @staticmethod
    def from_json(d: dict) -> "SubgraphCertificate":
        wl = WellLinkedCertificate.from_json(d["well_linked"]) if d.get("well_linked") else None
        return SubgraphCertificate(frozenset(d["vertices"]), d["r"], wl, d["corollary_bound"],
                                   d["tw_holds"], d["tw_method"], d.get("source", ""))


def _corollary(cert: WellLinkedCertificate, sub: Graph) -> int:
    """Treewidth bound from a well-linked set; sampled alphas over-estimate, so they give 0."""
    if cert.alpha <= 0 or not cert.terminal_set or cert.mode != "exhaustive":
        return 0
    return tw_lower_bound_from_well_linked(len(cert.terminal_set), cert.alpha, max(1, sub.max_degree()))


def certify_subgraph(g: Graph, vertices, gamma_set, r: int, cfg: SolverConfig, source: str,
                     samples: int = 48) -> SubgraphCertificate:
    """Measure how well-linked gamma_set is in g[vertices] and confirm tw >= r soundly."""
    vs = frozenset(vertices)
    sub = g.induced(vs)
    wl = None
    bound = 0
    xs = frozenset(gamma_set) & vs
    if len(xs) >= 2 and sub.is_connected():
        alpha = exact_wl_alpha(sub, xs, cfg)
        if alpha is not None:
            wl = WellLinkedCertificate(xs, alpha, mode="exhaustive", witness={}, host=vs)
        else:
            alpha, pairs = sampled_alpha(sub, xs, samples, cfg.seed)
            wl = WellLinkedCertificate(xs, alpha, mode="sampled", witness={"samples": pairs}, host=vs)
        bound = _corollary(wl, sub)
    holds, method = treewidth_at_least(sub, r)
    return SubgraphCertificate(vs, r, wl, bound, holds, method, source)


# ---------------------------------------------------------------------------
# clustering state


@dataclass
class Clustering:
    clusters: List[FrozenSet[int]]
    mode: str
    contracted: Graph
    phi: int

    @staticmethod
    def build(g: Graph, clusters: Sequence[FrozenSet[int]], mode: str) -> "Clustering":
        cs = sorted((frozenset(c) for c in clusters), key=min)
        h = contract_clustering(g, cs, mode)
        return Clustering(cs, mode, h, h.m())

    def uncontract(self, supers) -> FrozenSet[int]:
        out = set()
        for s in supers:
            out |= self.clusters[s]
        return frozenset(out)


def acceptability_violations(g: Graph, c: FrozenSet[int], p: Params, mode: str,
                             cfg: SolverConfig, check_good: bool = True) -> List[str]:
    bad = []
    if count_out(g, c) > p.r_prime:
        bad.append("boundary exceeds r'")
    if 2 * len(c & g.terminals) > len(g.terminals):
        bad.append("holds more than half the terminals")
    if mode == MODE_THM2:
        if not g.induced(c).is_connected():
            bad.append("not connected")
    elif check_good and len(c) > 1:
        res = check_alpha_good(g, c, p.alpha_wl, cfg)
        if not res.passed:
            bad.append("not alpha_wl-good")
    return bad


# ---------------------------------------------------------------------------
# preprocessing


@dataclass
class Preprocessed:
    graph: Graph  # working graph, terminals marked
    certificate: WellLinkedCertificate
    delta: int
    tw_lower: int
    tw_upper: int
    reduced: bool
    info: dict = field(default_factory=dict)


def preprocess(g: Graph, cfg: PipelineConfig = PipelineConfig()) -> Preprocessed:
    """Estimate tw, reduce the degree when it is above the target, pick terminals T.

    The default target is log2(tw lower bound)^3, the degree bound the
    reduction would guarantee anyway.
    """
    if g.n() == 0 or not g.is_connected():
        raise GraphError("the pipeline needs a connected, non-empty graph")
    if g.n() <= EXACT_LIMIT:
        tw, _ = exact_treewidth(g)
        lo = hi = tw
    else:
        lo, _ = minor_lower_bound(g)
        hi, _ = tw_upper_bound(g)
    info: dict = {}
    work = g
    reduced = False
    target = cfg.degree_target
    if target is None:
        target = math.ceil(_log2(max(lo, 2)) ** 3)
    if g.max_degree() > target:
        x = find_well_linked_set(g, cfg.solver)
        rounds = cfg.cmg_rounds or max(4, math.ceil(_log2(len(x.terminal_set))) ** 2 // 2)
        # edge well-linkedness does not bound vertex congestion near a hub, so the
        # capacity doubles until the flows exist (at 1/|X| every vertex can carry all of them)
        alpha = x.alpha
        while True:
            try:
                red = reduce_degree(g, x.terminal_set, alpha, rounds, seed=cfg.seed)
                break
            except ExpanderError:
                if alpha * len(x.terminal_set) <= 1:
                    raise
                alpha /= 2
        comps = red.graph.components()
        keep = max(comps, key=lambda c: (len(c & x.terminal_set), len(c), -min(c)))
        work = g.induced(keep, terminals=())
        reduced = True
        info = {"degree_reduction": {"target": target, "terminals": len(x.terminal_set), "alpha": str(x.alpha),
                                      "routing_alpha": str(alpha), "rounds": rounds, "vertex_cap": red.vertex_cap,
                                      "max_degree": red.max_degree, "degree_cap": red.degree_cap,
                                      "vertices": work.n(), "edges": work.m()}}
    cert = find_well_linked_set(work, cfg.solver)
    work = work.with_terminals(cert.terminal_set)
    return Preprocessed(work, cert, work.max_degree(), lo, hi, reduced, info)


def feasibility_gate(g: Graph, h: int, r: int, theorem: int, tw_upper: int, cfg: PipelineConfig):
    """Concrete stand-in for the asymptotic parameter regime; raises ParameterError."""
    if h < 1 or r < 1:
        raise ParameterError("h and r must be positive")
    if r > tw_upper:
        raise ParameterError(f"r = {r} exceeds the treewidth upper bound {tw_upper}")
    if h * (r + 1) > g.n():
        raise ParameterError(f"{h} subgraphs of treewidth {r} need {h * (r + 1)} vertices; graph has {g.n()}")
    load = h * r * r if theorem == 1 else h ** 3 * r
    if load > cfg.feasibility_slack * g.n():
        raise ParameterError(f"{'h·r^2' if theorem == 1 else 'h^3·r'} = {load} exceeds "
                             f"{cfg.feasibility_slack}·n = {cfg.feasibility_slack * g.n()}")


# ---------------------------------------------------------------------------
# result


@dataclass
class DecompositionResult:
    theorem: int
    h: int
    r: int
    subgraphs: List[FrozenSet[int]]
    certificates: List[SubgraphCertificate]
    phi_trace: List[int]
    case_path: List[str]
    log: List[dict]
    params: dict
    config: dict
    seed: int
    timings: Dict[str, float] = field(default_factory=dict)
    warnings: List[str] = field(default_factory=list)

    def to_report(self) -> dict:
        return {
            "command": "decompose",
            "theorem": self.theorem,
            "params": {"h": self.h, "r": self.r, **self.params},
            "config": self.config,
            "seed": self.seed,
            "case_path": self.case_path,
            "phi_trace": self.phi_trace,
            "subgraphs": [sorted(s) for s in self.subgraphs],
            "certificates": [c.to_json() for c in self.certificates],
            "log": self.log,
            "warnings": self.warnings,
            "timings": self.timings,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_report(), sort_keys=True, indent=1)


def _finish(g_input: Graph, theorem: int, h: int, r: int, subs, certs, phi_trace, path, log,
            p: Params, cfg: PipelineConfig, t0: float, warnings, pre: Preprocessed) -> DecompositionResult:
    seen: set = set()
    for s in subs:
        assert not (s & seen), "subgraphs overlap"
        seen |= s
    for c in certs:
        if not (c.tw_holds or c.corollary_bound >= r):
            raise PipelineError(f"subgraph {sorted(c.vertices)[:6]}... not certified ({c.tw_method})",
                                {"phi_trace": phi_trace, "case_path": path, "log": log})
    params = {**p.to_json(), "tw_lower": pre.tw_lower, "tw_upper": pre.tw_upper,
              "working_vertices": pre.graph.n(), "working_edges": pre.graph.m(), **pre.info}
    return DecompositionResult(theorem, h, r, list(subs), list(certs), phi_trace, path, log, params,
                               cfg.to_json(), cfg.seed, {"total_s": round(time.perf_counter() - t0, 3)},
                               warnings)


def _check_potential(p: Params, phi: int, log: List[dict]):
    """phi >= alpha*·k/3 for any acceptable clustering; asserted when alpha* is exact."""
    lower = p.alpha_star * p.k / 3
    ok = phi >= lower
    if p.alpha_star_exact:
        assert ok, (phi, str(lower))
    elif not ok:
        log.append({"event": "potential-below-bound", "phi": phi, "bound": str(lower)})


def _recluster(g: Graph, cl: Clustering, region: FrozenSet[int], parts: Sequence[FrozenSet[int]],
               p: Params, cfg: SolverConfig) -> Tuple[Optional[Clustering], str]:
    """Replace the clusters inside ``region`` by ``parts``; None if phi would not drop."""
    keep = [c for c in cl.clusters if not (c & region)]
    assert all(c <= region for c in cl.clusters if c & region)
    for part in parts:
        bad = acceptability_violations(g, part, p, cl.mode, cfg)
        if bad:
            return None, f"part of size {len(part)}: {', '.join(bad)}"
    new = Clustering.build(g, keep + list(parts), cl.mode)
    if new.phi > cl.phi - 1:
        return None, f"phi would go {cl.phi} -> {new.phi}"
    return new, "ok"


# ---------------------------------------------------------------------------
# good-cluster route, case 1: balanced split


@dataclass
class Outcome:
    kind: str  # "result" | "recluster"
    subgraphs: List[FrozenSet[int]] = field(default_factory=list)
    certificates: List[SubgraphCertificate] = field(default_factory=list)
    clustering: Optional[Clustering] = None
    case: str = ""
    log: List[dict] = field(default_factory=list)


def case1_balanced_split(g: Graph, cl: Clustering, p: Params, cfg: PipelineConfig) -> Outcome:
    """Split H into h+1 Z-balanced pieces, then well-linked-decompose each piece in G."""
    h_graph = cl.contracted
    log: List[dict] = []
    z = min(h_graph.n(), p.k ** 5)
    zs = frozenset(h_graph.sorted_vertices()[:z])
    gamma = Fraction(cfg.solver.gamma_balance)
    pieces: List[FrozenSet[int]] = [frozenset(h_graph.vertices)]
    for rnd in range(p.h):
        s = max(pieces, key=lambda x: (len(x & zs), -min(x)))
        try:
            cut = balanced_cut(h_graph, s, zs, cfg.solver)
        except CutError as e:
            raise PipelineError(f"balanced cut failed in round {rnd}: {e}", {"log": log})
        a, b = cut.side_a, cut.side_b
        assert min(len(a & zs), len(b & zs)) >= gamma * len(s & zs)
        pieces.remove(s)
        pieces += [a, b]
        floor = gamma * z / (2 * p.h)
        assert all(len(x & zs) >= floor for x in pieces), "balance invariant broken"
        log.append({"event": "balanced-cut", "round": rnd, "crossing": cut.crossing,
                    "k_squared": p.k ** 2, "within_k_squared": cut.crossing <= p.k ** 2,
                    "exact": cut.exact, "sides": [len(a), len(b)]})
    pieces.sort(key=min)
    uncontracted = [cl.uncontract(x) for x in pieces]
    tcount = [len(u & g.terminals) for u in uncontracted]
    drop = max(range(len(pieces)), key=lambda i: (tcount[i], -i))
    assert sum(1 for c in tcount if 2 * c > len(g.terminals)) <= 1
    kept = [uncontracted[i] for i in range(len(pieces)) if i != drop]
    chosen: List[FrozenSet[int]] = []
    for i, xp in enumerate(kept):
        dec = _wl_decompose(g, xp, p, cfg.solver, log)
        big = [w for w in dec if count_out(g, w) > p.r_prime]
        if not big:
            new, why = _recluster(g, cl, xp, dec, p, cfg.solver)
            log.append({"event": "case1-recluster-attempt", "piece": i, "parts": len(dec), "result": why})
            if new is not None:
                return Outcome("recluster", clustering=new, case="case1", log=log)
            continue
        chosen.append(max(big, key=lambda w: (count_out(g, w), -min(w))))
    if len(chosen) < p.h:
        raise PipelineError("case 1: some piece has only small parts yet re-clustering does not lower phi",
                            {"log": log})
    certs = []
    for c in chosen:
        gam = frozenset(v for e in out_edges(g, c) for v in e if v in c)
        assert len(gam) * p.delta >= count_out(g, c)
        certs.append(certify_subgraph(g, c, gam, p.r, cfg.solver, "case1"))
    return Outcome("result", chosen, certs, case="case1", log=log)


def _wl_decompose(g: Graph, region: FrozenSet[int], p: Params, cfg: SolverConfig, log) -> List[FrozenSet[int]]:
    try:
        dec = well_linked_decomposition(g, region, p.alpha_wl, cfg, strict=True, verify=False)
    except PreconditionError:
        dec = well_linked_decomposition(g, region, p.alpha_wl, cfg, strict=False, verify=False)
        log.append({"event": "wl-precondition-unmet", "k_prime": dec.k_prime})
    log.append({"event": "wl-decomposition", "size": len(region), "parts": len(dec.parts),
                "boundary_sum": dec.boundary_sum, "bound": round(dec.bound, 3)})
    return dec.parts


# ---------------------------------------------------------------------------
# good-cluster route, case 2: expander packing


def embed_expander_witness(h_part: Graph, g: Graph, cl: Clustering, p: Params, cfg: PipelineConfig,
                           attempt_seed: int = 0) -> Tuple[FrozenSet[int], SubgraphCertificate, dict]:
    """Embed a small cubic expander into h_part; return the touched super-nodes and a certificate.

    The host is made max-degree-4 by splitting, r'' spread vertices of
    distinct super-nodes are matched to the expander, and its edges are
    routed on short low-congestion paths. The certificate is the set of
    G-endpoints of the host edges at those vertices, checked in the
    un-contracted subgraph; r'' doubles on a failed check.
    """
    if h_part.m() < 1:
        raise PreconditionError("empty host")
    rng = random.Random(cfg.seed * 7919 + attempt_seed)
    start = rng.choice(h_part.sorted_vertices())
    comp = next(c for c in h_part.components() if start in c)
    host = h_part.induced(comp)
    split, smap = split_vertices(host, seed=cfg.seed)
    alpha0, alpha_mode = measure_expansion(split)
    if alpha0 <= 0:
        raise RoutingError("split host is not an expander")
    order = _bfs_order(host, start)
    # the k-th parallel copy of an H edge stands for the k-th G edge between the clusters
    where = {v: i for i, c in enumerate(cl.clusters) for v in c}
    g_edges: Dict[Tuple[int, int], List[Tuple[int, int]]] = {}
    for u, v in g.edges:
        cu, cv = where[u], where[v]
        if cu != cv:
            g_edges.setdefault((min(cu, cv), max(cu, cv)), []).append((u, v))
    seen_pair: Dict[Tuple[int, int], int] = {}
    external: Dict[int, Tuple[int, int]] = {}
    for i, (a, b) in enumerate(host.edges):
        k = seen_pair.get((a, b), 0)
        seen_pair[(a, b)] = k + 1
        ge = g_edges[(a, b)][k]
        for x, sup in zip(smap.edge_ends[i], (a, b)):
            external.setdefault(x, ge)
    rpp = p.r_double_prime
    last = None
    for retry in range(cfg.embed_retries):
        if rpp > len(order):
            raise PreconditionError(f"r'' = {rpp} exceeds the {len(order)} super-nodes available")
        gamma_sup = order[:rpp]
        gamma_split = [smap.clusters[v][0] for v in gamma_sup]
        wit = build_small_expander(rpp, 3, seed=cfg.seed + retry)
        matchings = [[(gamma_split[a], gamma_split[b]) for a, b in m]
                     for m in edge_coloring_matchings(wit.graph)]
        assert len(matchings) <= 5
        emb = route_matchings_short_paths(split, matchings, alpha0, cfg.c_len, cfg.c_cong,
                                          seed=cfg.seed + retry)
        s_sup = frozenset(smap.origin[x] for path in emb.paths.values() for x in path)
        if len(s_sup) > p.r_prime:
            last = f"|S| = {len(s_sup)} > r' = {p.r_prime}"
            rpp *= 2
            continue
        gvs = cl.uncontract(s_sup)
        gam = set()
        for sup, x in zip(gamma_sup, gamma_split):
            u, v = external[x]
            gam.add(u if u in cl.clusters[sup] else v)
        assert len(gam) * p.delta >= rpp or len(gam) >= rpp / max(1, p.delta)
        cert = certify_subgraph(g, gvs, gam, p.r, cfg.solver, "case2-embedding")
        info = {"r_double_prime": rpp, "supernodes": len(s_sup), "path_length": emb.max_length,
                "congestion": emb.edge_congestion, "host_expansion": str(alpha0),
                "expansion_mode": alpha_mode, "tw_method": cert.tw_method}
        if cert.tw_holds or cert.corollary_bound >= p.r:
            return s_sup, cert, info
        last = f"embedding with r'' = {rpp} gave no treewidth >= {p.r} ({cert.tw_method})"
        rpp *= 2
    raise RoutingError(f"embedding retries exhausted: {last}")


def _bfs_order(g: Graph, start: int) -> List[int]:
    adj = g.adj()
    seen = {start}
    q = deque([start])
    order = []
    while q:
        x = q.popleft()
        order.append(x)
        for y in sorted(set(adj[x])):
            if y not in seen:
                seen.add(y)
                q.append(y)
    return order


def case2_expander_pack(g: Graph, cl: Clustering, p: Params, cfg: PipelineConfig) -> Outcome:
    """Phase 1: high-conductance parts of H. Phase 2: pack expander embeddings into them."""
    hg = cl.contracted
    log: List[dict] = []
    part = decompose_high_conductance(hg, cfg.solver)
    log.append({"event": "conductance-decomposition", "parts": len(part.parts),
                "boundary_total": part.boundary_total, "m": hg.m(), "threshold": str(part.threshold)})
    survivors = [x for x in part.parts if 2 * count_out(hg, x) < count_inner(hg, x)]
    if not survivors:
        raise PipelineError("case 2: every high-conductance part has a large boundary", {"log": log})
    for x in sorted(survivors, key=lambda y: (count_inner(hg, y), min(y))):
        if count_inner(hg, x) > 2 * p.r_prime:
            continue
        xp = cl.uncontract(x)
        if 2 * len(xp & g.terminals) >= len(g.terminals):
            log.append({"event": "small-part-terminal-heavy", "size": len(xp)})
            continue
        dec = _wl_decompose(g, xp, p, cfg.solver, log)
        new, why = _recluster(g, cl, xp, dec, p, cfg.solver)
        log.append({"event": "case2-recluster-attempt", "edges": count_inner(hg, x), "result": why})
        if new is not None:
            return Outcome("recluster", clustering=new, case="case2-phase1", log=log)
    big = [x for x in survivors if count_inner(hg, x) > 2 * p.r_prime]
    if not big:
        raise PipelineError("case 2: small parts exist but none re-clusters with a phi drop", {"log": log})
    gamma_t = min(Fraction(1, 10), conductance_threshold(hg.m(), p.arv))
    subs: List[FrozenSet[int]] = []
    certs: List[SubgraphCertificate] = []
    for x in sorted(big, key=lambda y: (-count_inner(hg, y), min(y))):
        m_i = count_inner(hg, x)
        h_i = math.ceil(Fraction(6 * m_i * p.h) / (p.alpha_star * p.k))
        hx = hg.induced(x)
        removed: set = set()
        current = hx
        degree_sum = 0
        for j in range(h_i):
            if len(subs) >= p.h:
                break
            if current.m() < p.r_prime:
                log.append({"event": "phase2-host-too-small", "edges": current.m(), "r_prime": p.r_prime})
                break
            try:
                s_sup, cert, info = embed_expander_witness(current, g, cl, p, cfg, attempt_seed=j)
            except (RoutingError, ExpanderError, PreconditionError) as e:
                log.append({"event": "embedding-failed", "round": j, "reason": str(e)})
                break
            subs.append(cert.vertices)
            certs.append(cert)
            removed |= s_sup
            degree_sum += sum(hg.degree(v) for v in s_sup)
            budget_ok = 8 * degree_sum <= gamma_t * m_i
            if cfg.constants == "asymptotic":
                assert budget_ok, (degree_sum, str(gamma_t), m_i)
            tr = trim_after_removal(hx, removed, gamma_t, cfg.solver, strict=False)
            log.append({"event": "embedding", "part_edges": m_i, "h_i": h_i, "round": j, **info,
                        "degree_sum": degree_sum, "budget": float(gamma_t * m_i / 8), "budget_ok": budget_ok,
                        "trim_kept": len(tr.keep), "trim_peeled": len(tr.peeled),
                        "trim_precondition": tr.precondition_ok})
            current = hx.induced(tr.keep)
        if len(subs) >= p.h:
            break
    if len(subs) < p.h:
        raise PipelineError(f"case 2 produced {len(subs)} of {p.h} subgraphs", {"log": log})
    return Outcome("result", subs[:p.h], certs[:p.h], case="case2", log=log)


def iteration_thm1(g: Graph, cl: Clustering, p: Params, cfg: PipelineConfig) -> Outcome:
    n = cl.contracted.n()
    if cfg.case1_rule == "asymptotic":
        case1 = n >= p.k ** 5
    else:
        case1 = n >= cfg.beta * p.k ** 2
    out = case1_balanced_split(g, cl, p, cfg) if case1 else case2_expander_pack(g, cl, p, cfg)
    if out.kind == "recluster":
        assert out.clustering.phi <= cl.phi - 1
    return out


def _run(g: Graph, h: int, r: int, theorem: int, cfg: PipelineConfig) -> DecompositionResult:
    t0 = time.perf_counter()
    pre = preprocess(g, cfg)
    work = pre.graph
    feasibility_gate(work, h, r, theorem, pre.tw_upper, cfg)
    p = derive_params(theorem, len(pre.certificate.terminal_set), pre.certificate.alpha,
                      pre.certificate.mode == "exhaustive", pre.delta, h, r, cfg)
    warnings = []
    if not pre.certificate.alpha > 0:
        raise PipelineError("terminal set has zero measured well-linkedness")
    mode = MODE_THM1 if theorem == 1 else MODE_THM2
    cl = Clustering.build(work, [frozenset([v]) for v in work.vertices], mode)
    phi_trace = [cl.phi]
    if h == 1 and pre.tw_lower >= r:
        # one subgraph is the whole graph; the verified lower bound already certifies it
        cert = certify_subgraph(g, g.vertices, pre.certificate.terminal_set, r, cfg.solver, "whole-graph")
        return _finish(g, theorem, h, r, [frozenset(g.vertices)], [cert], phi_trace, ["whole-graph"],
                       [{"event": "whole-graph", "tw_lower": pre.tw_lower}], p, cfg, t0, warnings, pre)
    path: List[str] = []
    log: List[dict] = []
    budget = cfg.max_iterations if cfg.max_iterations is not None else work.m() + 1
    step = iteration_thm1 if theorem == 1 else iteration_thm2
    for it in range(budget):
        _check_potential(p, cl.phi, log)
        try:
            out = step(work, cl, p, cfg)
        except PipelineError as e:
            e.trace = {"phi_trace": phi_trace, "case_path": path, "log": log + e.trace.get("log", [])}
            raise
        path.append(out.case)
        log += [{"iteration": it, **e} for e in out.log]
        if out.kind == "result":
            if pre.reduced:
                # the working graph is a subgraph of g, so certifying on g is sound and stronger
                out.certificates = [
                    certify_subgraph(g, c.vertices, c.well_linked.terminal_set if c.well_linked else (),
                                     r, cfg.solver, c.source) for c in out.certificates]
            return _finish(g, theorem, h, r, out.subgraphs, out.certificates, phi_trace, path, log, p,
                           cfg, t0, warnings, pre)
        assert out.clustering.phi < cl.phi
        cl = out.clustering
        phi_trace.append(cl.phi)
    raise PipelineError(f"no result within {budget} iterations",
                        {"phi_trace": phi_trace, "case_path": path, "log": log})


def decompose_thm1(g: Graph, h: int, r: int, cfg: PipelineConfig = PipelineConfig()) -> DecompositionResult:
    """h disjoint subgraphs of treewidth >= r via good clusters (balanced splits or expander packing)."""
    return _run(g, h, r, 1, cfg)


# ---------------------------------------------------------------------------
# random-partition route


def random_partition_check(hg: Graph, parts: Sequence[FrozenSet[int]], h: int) -> dict:
    m = hg.m()
    outs = [count_out(hg, x) for x in parts]
    ins = [count_inner(hg, x) for x in parts]
    return {
        "out": outs,
        "inner": ins,
        "out_ok": all(h * o < 16 * m for o in outs),
        "inner_ok": all(8 * h * h * e >= m for e in ins),
    }


def iteration_thm2(g: Graph, cl: Clustering, p: Params, cfg: PipelineConfig) -> Outcome:
    hg = cl.contracted
    log: List[dict] = []
    rng = random.Random(cfg.seed * 1_000_003 + cl.phi)
    verts = hg.sorted_vertices()
    parts = None
    for attempt in range(cfg.partition_retries):
        idx = [rng.randrange(p.h + 1) for _ in verts]
        cand = [frozenset(v for v, i in zip(verts, idx) if i == j) for j in range(p.h + 1)]
        if any(not c for c in cand):
            log.append({"event": "partition-rejected", "attempt": attempt, "reason": "empty part"})
            continue
        chk = random_partition_check(hg, cand, p.h)
        if chk["out_ok"] and chk["inner_ok"]:
            parts = cand
            log.append({"event": "partition-accepted", "attempt": attempt, "m": hg.m(), **chk})
            break
        log.append({"event": "partition-rejected", "attempt": attempt, **chk})
    if parts is None:
        raise PipelineError("no random partition met the edge conditions", {"log": log})
    xs = [cl.uncontract(x) for x in parts]
    tcount = [len(x & g.terminals) for x in xs]
    drop = max(range(len(xs)), key=lambda i: (tcount[i], -i))
    kept = [xs[i] for i in range(len(xs)) if i != drop]
    results = []
    for j, xp in enumerate(kept):
        got = _claim_well_linked_subset(g, xp, p, cfg.solver, log)
        if isinstance(got, list):
            pieces = [c for w in got for c in g.induced(w).components()]
            new, why = _recluster(g, cl, xp, pieces, p, cfg.solver)
            log.append({"event": "thm2-recluster-attempt", "part": j, "result": why})
            if new is not None:
                return Outcome("recluster", clustering=new, case="thm2", log=log)
            raise PipelineError(f"thm2: re-clustering part {j} does not lower phi ({why})", {"log": log})
        results.append((xp, got))
    subs, certs = [], []
    for xp, s_j in results:
        subs.append(xp)
        certs.append(certify_subgraph(g, xp, s_j, p.r, cfg.solver, "thm2"))
    return Outcome("result", subs, certs, case="thm2", log=log)


def _claim_well_linked_subset(g: Graph, xp: FrozenSet[int], p: Params, cfg: SolverConfig, log):
    """Either r'/Δ-ish endpoints that are gamma-well-linked in G[xp], or the final cluster list."""
    w: List[FrozenSet[int]] = [xp]
    threshold = p.gamma_thm2 * p.arv
    while True:
        big = [c for c in w if count_out(g, c) >= p.r_prime]
        if not big:
            return w
        c = max(big, key=lambda y: (count_out(g, y), -min(y)))
        gamma_edges = sorted(out_edges(g, c))[:p.r_prime]
        base = max(g.vertices) + 1
        inner = {}
        es = list(g.induced(c).edges)
        for i, (u, v) in enumerate(gamma_edges):
            x = u if u in c else v
            inner[base + i] = x
            es.append((x, base + i))
        inst = Graph(set(c) | set(inner), es)
        cut = sparsest_cut(inst, inner.keys(), cfg)
        if cut.sparsity >= threshold:
            s_j = frozenset(inner.values())
            log.append({"event": "well-linked-subset", "size": len(s_j), "sparsity": str(cut.sparsity),
                        "exact": cut.exact})
            return s_j
        a, b = cut.side_a & c, cut.side_b & c
        if not a or not b:
            s_j = frozenset(inner.values())
            log.append({"event": "well-linked-subset", "size": len(s_j), "sparsity": str(cut.sparsity),
                        "exact": cut.exact, "note": "violating cut only separates terminals"})
            return s_j
        if count_out(g, a) > count_out(g, b):
            a, b = b, a
        log.append({"event": "split", "sizes": [len(a), len(b)], "crossing": count_out(g, a) + count_out(g, b)
                    - count_out(g, c), "sparsity": str(cut.sparsity)})
        w.remove(c)
        w += [a, b]


def decompose_thm2(g: Graph, h: int, r: int, cfg: PipelineConfig = PipelineConfig()) -> DecompositionResult:
    """h disjoint subgraphs of treewidth >= r via random partitions of connected clusters."""
    return _run(g, h, r, 2, cfg)


def verify_report(report: dict, g: Graph, cfg: SolverConfig = SolverConfig()) -> List[str]:
    """Replay every certificate of a report against g; returns the failures."""
    errors = []
    subs = [frozenset(s) for s in report.get("subgraphs", [])]
    seen: set = set()
    for s in subs:
        if s & seen:
            errors.append("subgraphs overlap")
        seen |= s
    h = report.get("params", {}).get("h")
    if h is not None and len(subs) != h:
        errors.append(f"expected {h} subgraphs, found {len(subs)}")
    certs = [SubgraphCertificate.from_json(c) for c in report.get("certificates", [])]
    if len(certs) != len(subs):
        errors.append("certificate count does not match subgraph count")
    for i, c in enumerate(certs):
        if i < len(subs) and c.vertices != subs[i]:
            errors.append(f"certificate {i} covers a different vertex set")
        why = c.replay(g, cfg)
        if why:
            errors.append(f"certificate {i}: {why}")
    trace = report.get("phi_trace", [])
    if any(b >= a for a, b in zip(trace, trace[1:])):
        errors.append("phi trace is not strictly decreasing")
    return errors

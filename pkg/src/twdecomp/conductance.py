"""High-conductance decomposition and trimming after vertex removal."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import List, Optional

from .cuts_flows import CutError, SolverConfig, min_conductance_cut
from .graph_core import Graph, count_inner, count_out
from .well_linked import PreconditionError, well_linked_decomposition


@dataclass
class ConductancePartition:
    parts: List[frozenset]
    boundary_total: int
    threshold: Fraction
    per_part_conductance: List[Optional[Fraction]] = field(default_factory=list)
    verified: List[Optional[bool]] = field(default_factory=list)  # None: not checked exactly
    m: int = 0

    @property
    def ok(self) -> bool:
        return 10 * self.boundary_total <= self.m and all(v is not False for v in self.verified)


def conductance_threshold(m: int, arv=1) -> Fraction:
    """1 / (160·arv·log2 m), rounded down to a rational with denominator <= 10^9."""
    if m <= 1:
        return Fraction(1)
    exact = 1 / (160 * Fraction(arv) * Fraction(math.log2(m)))
    approx = exact.limit_denominator(10**9)
    return approx if approx <= exact else approx - Fraction(1, 10**9)


def part_conductance(g: Graph, part, cfg: SolverConfig, verify_limit: int = 14):
    """(Ψ(g[part]) or None when no valid cut exists, exact?)."""
    sub = g.induced(part)
    active = sum(1 for v in sub.vertices if sub.degree(v) > 0)
    exact = active <= verify_limit
    try:
        cut = min_conductance_cut(sub, cfg.with_(mode="auto") if exact else cfg)
    except CutError:
        return None, True
    return cut.conductance, cut.exact


def decompose_high_conductance(h: Graph, cfg: SolverConfig = SolverConfig(),
                               alpha_override=None, verify_limit: int = 14) -> ConductancePartition:
    """Partition V(h) into parts of conductance >= 1/(160·arv·log m), boundary <= m/10.

    Each edge e is subdivided by v_e with a pendant t_e; the original and
    subdivision vertices are then well-linked decomposed (boundary = the
    pendant edges) and every part is projected back onto V(h).
    """
    m = h.m()
    arv = Fraction(cfg.arv_factor)
    alpha = Fraction(alpha_override) if alpha_override is not None else conductance_threshold(m, arv)
    if m <= 1:
        parts = [frozenset(c) for c in h.components()]
        return ConductancePartition(parts, sum(count_out(h, p) for p in parts), alpha,
                                    [None] * len(parts), [True] * len(parts), m)
    base = max(h.vertices) + 1
    sub_of = {}
    es = []
    for i, (u, v) in enumerate(h.edges):
        ve, te = base + 2 * i, base + 2 * i + 1
        sub_of[ve] = i
        es += [(u, ve), (ve, v), (ve, te)]
    hp = Graph(list(h.vertices) + [base + j for j in range(2 * m)], es)
    parts: List[frozenset] = []
    for comp in h.components():
        comp_edges = [i for i, (u, v) in enumerate(h.edges) if u in comp]
        s = set(comp) | {base + 2 * i for i in comp_edges}
        if not comp_edges:
            parts.append(frozenset(comp))
            continue
        dec = well_linked_decomposition(hp, s, alpha, cfg, strict=alpha_override is None, verify=False)
        for w in dec.parts:
            proj = frozenset(x for x in w if x < base)
            if proj:
                parts.append(proj)
    parts.sort(key=min)
    total = sum(count_out(h, p) for p in parts)
    if alpha_override is None:
        assert 10 * total <= m, (total, m)
    psi, ver = [], []
    for p in parts:
        val, exact = part_conductance(h, p, cfg, verify_limit)
        psi.append(val)
        if val is None:
            ver.append(True)
        elif exact:
            ver.append(val >= alpha)
        else:
            ver.append(None)
    return ConductancePartition(parts, total, alpha, psi, ver, m)


@dataclass
class TrimResult:
    keep: frozenset
    peeled: List[frozenset]
    charge: int  # |R|: removed edges plus all peeled cut edges
    edges_kept: int
    conductance: Optional[Fraction]
    conductance_exact: bool
    precondition_ok: bool  # budget met and Ψ(g_big) >= gamma verified
    m: int
    gamma: Fraction


def trim_after_removal(g_big: Graph, removed, gamma, cfg: SolverConfig = SolverConfig(),
                       strict: bool = True, psi_big: Optional[Fraction] = None) -> TrimResult:
    """Peel low-conductance pieces off g_big - removed until none is sparser than gamma/4.

    The smaller side A (by edges of g_big) of a cut with
    |E(A,B)| < gamma·|E(A)|/4 is deleted each round. Preconditions: gamma
    <= 0.1, Ψ(g_big) >= gamma, and at most gamma·m/8 edges lost to the
    removal; ``strict`` turns a violation into an error.
    """
    gamma = Fraction(gamma)
    removed = g_big.check_subset(removed)
    m = g_big.m()
    if gamma > Fraction(1, 10) or gamma <= 0:
        raise PreconditionError("gamma must lie in (0, 0.1]")
    h = g_big.remove_vertices(removed)
    lost = m - h.m()
    if psi_big is None and g_big.n() <= cfg.exact_limit and m >= 2:
        try:
            psi_big = min_conductance_cut(g_big, cfg.with_(mode="auto")).conductance
        except CutError:
            psi_big = None
    psi_ok = psi_big is not None and psi_big >= gamma
    pre_ok = 8 * lost <= gamma * m and psi_big is not None and psi_big >= gamma
    if strict and not (8 * lost <= gamma * m and (psi_big is None or psi_ok)):
        raise PreconditionError(
            f"removal costs {lost} edges (limit {float(gamma * m / 8):.3g}) or Ψ = {psi_big} < {gamma}")
    keep = set(h.vertices)
    peeled: List[frozenset] = []
    charge = lost
    while True:
        sub = g_big.induced(keep)
        if sub.m() < 2:
            break
        try:
            cut = min_conductance_cut(sub, cfg)
        except CutError:
            break
        a, b = cut.side_a, cut.side_b
        ea, eb = count_inner(g_big, a), count_inner(g_big, b)
        if ea > eb:
            a, b, ea, eb = b, a, eb, ea
        if 4 * cut.crossing < gamma * ea:
            keep -= a
            peeled.append(frozenset(a))
            charge += cut.crossing
            continue
        break
    final = g_big.induced(keep)
    try:
        fc = min_conductance_cut(final, cfg)
        psi, exact = fc.conductance, fc.exact
    except CutError:
        psi, exact = None, True
    if pre_ok and exact:
        # the charging argument needs a verified Ψ(g_big) and exact cuts
        assert 4 * charge <= gamma * m, (charge, gamma, m)
        assert 2 * final.m() >= m, (final.m(), m)
    return TrimResult(frozenset(keep), peeled, charge, final.m(), psi, exact, pre_ok, m, gamma)

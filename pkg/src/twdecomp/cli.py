"""twdecomp command line: decompose, analyze, verify, ep, expander."""
from __future__ import annotations

import csv
import json
import random
import sys
import time
from typing import Optional

import click

from .conductance import decompose_high_conductance
from .cuts_flows import CutError, SolverConfig, min_conductance_cut
from .graph_core import Graph, GraphError, ParseError, parse_graph
from .treewidth import EXACT_LIMIT, exact_treewidth, minor_lower_bound, tw_upper_bound

EXIT_OK = 0
EXIT_FAILED_CHECK = 1
EXIT_INFEASIBLE = 2
EXIT_PIPELINE = 3
EXIT_USAGE = 64
EXIT_NOINPUT = 66


class CliExit(Exception):
    def __init__(self, code: int, msg: str = ""):
        super().__init__(msg)
        self.code = code
        self.msg = msg


def _detect_format(path: str, text: str) -> str:
    if path.endswith((".dimacs", ".col", ".gr")):
        return "dimacs"
    for line in text.splitlines():
        s = line.strip()
        if not s or s.startswith("c"):
            continue
        return "dimacs" if s.startswith("p ") else "edgelist"
    return "edgelist"


def load_graph(path: str, fmt: str = "auto", zero_indexed: bool = False) -> Graph:
    try:
        with open(path, "rb") as fh:
            text = fh.read().decode()
    except (OSError, UnicodeDecodeError) as exc:
        raise CliExit(EXIT_NOINPUT, f"cannot read {path}: {exc}") from None
    if fmt == "auto":
        fmt = _detect_format(path, text)
    try:
        return parse_graph(text, fmt, zero_indexed)
    except ParseError as exc:
        raise CliExit(EXIT_NOINPUT, f"{path}: {exc}") from None


def graph_json(g: Graph) -> dict:
    return {"vertices": g.sorted_vertices(), "edges": [list(e) for e in g.edges]}


def graph_from_json(d: dict) -> Graph:
    return Graph(d["vertices"], [tuple(e) for e in d["edges"]])


def dumps(report: dict) -> str:
    return json.dumps(report, sort_keys=True, indent=1, default=str)


def _emit(report: dict, out: Optional[str]):
    text = dumps(report) + "\n"
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        click.echo(text, nl=False)


def _seed(value: str) -> int:
    if value == "random":
        return random.SystemRandom().randrange(2**31)
    try:
        return int(value)
    except ValueError:
        raise click.BadParameter("seed must be an integer or 'random'") from None


@click.group()
def cli():
    """Treewidth-preserving decompositions and their applications."""


FORMAT = click.option("--format", "fmt", type=click.Choice(["auto", "edgelist", "dimacs"]), default="auto",
                      show_default=True)
ZERO = click.option("--zero-indexed", is_flag=True, help="Edge-list ids already start at 0.")


@cli.command()
@click.argument("file")
@click.option("--h", "h", type=click.IntRange(min=1), required=True, help="Number of subgraphs.")
@click.option("--r", "r", type=click.IntRange(min=1), required=True, help="Treewidth each subgraph keeps.")
@click.option("--theorem", type=click.Choice(["1", "2"]), default="1", show_default=True)
@click.option("--seed", default="0", show_default=True, help="Integer, or 'random'.")
@click.option("--config", "config_path", default=None, help="JSON file of pipeline settings.")
@click.option("--out", default=None, help="Write the report here instead of stdout.")
@click.option("--trace", "trace_path", default=None, help="CSV of the potential per iteration.")
@FORMAT
@ZERO
def decompose(file, h, r, theorem, seed, config_path, out, trace_path, fmt, zero_indexed):
    """Split FILE's graph into h disjoint subgraphs of treewidth >= r."""
    from .decompose import (ParameterError, PipelineConfig, PipelineError, decompose_thm1,
                            decompose_thm2)

    g = load_graph(file, fmt, zero_indexed)
    cfg = PipelineConfig()
    if config_path:
        try:
            with open(config_path) as fh:
                cfg = PipelineConfig.from_json(json.load(fh))
        except OSError as exc:
            raise CliExit(EXIT_NOINPUT, f"cannot read {config_path}: {exc}") from None
        except (ValueError, TypeError) as exc:
            raise CliExit(EXIT_USAGE, f"bad config: {exc}") from None
    cfg = cfg.with_(seed=_seed(seed))
    run = decompose_thm1 if theorem == "1" else decompose_thm2
    try:
        res = run(g, h, r, cfg)
    except ParameterError as exc:
        raise CliExit(EXIT_INFEASIBLE, f"infeasible parameters: {exc}") from None
    except PipelineError as exc:
        if trace_path:
            _write_trace(trace_path, exc.trace.get("phi_trace", []), exc.trace.get("case_path", []))
        raise CliExit(EXIT_PIPELINE, f"pipeline failed: {exc}") from None
    report = res.to_report()
    report["graph"] = graph_json(g)
    report["outcome"] = "success"
    _emit(report, out)
    if trace_path:
        _write_trace(trace_path, res.phi_trace, res.case_path)


def _write_trace(path: str, phi, cases):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["iteration", "phi", "case"])
        for i, val in enumerate(phi):
            w.writerow([i, val, cases[i] if i < len(cases) else ""])


@cli.command()
@click.argument("file")
@click.option("--seed", default="0", show_default=True)
@FORMAT
@ZERO
def analyze(file, seed, fmt, zero_indexed):
    """Treewidth bounds, a well-linked set, and a conductance profile."""
    from .well_linked import find_well_linked_set

    g = load_graph(file, fmt, zero_indexed)
    cfg = SolverConfig(seed=_seed(seed))
    t0 = time.perf_counter()
    out: dict = {"command": "analyze", "n": g.n(), "m": g.m(), "max_degree": g.max_degree(),
                 "seed": cfg.seed, "graph": graph_json(g)}
    if g.n() <= EXACT_LIMIT:
        tw, _ = exact_treewidth(g)
        out["treewidth"] = {"lower": tw, "upper": tw, "method": "exact"}
    else:
        lb, _ = minor_lower_bound(g)
        ub, _ = tw_upper_bound(g)
        out["treewidth"] = {"lower": lb, "upper": ub, "method": "minor/min-fill"}
    if g.n() >= 1 and g.is_connected():
        cert = find_well_linked_set(g, cfg)
        out["well_linked"] = {"size": len(cert.terminal_set), "alpha": str(cert.alpha), "mode": cert.mode,
                              "terminals": sorted(cert.terminal_set)}
    else:
        out["well_linked"] = None
    try:
        cut = min_conductance_cut(g, cfg)
        out["conductance"] = {"value": str(cut.conductance), "exact": cut.exact,
                              "side": sorted(cut.side_a if len(cut.side_a) <= len(cut.side_b) else cut.side_b)}
    except CutError:
        out["conductance"] = None
    part = decompose_high_conductance(g, cfg)
    out["conductance_partition"] = {"parts": len(part.parts), "boundary_total": part.boundary_total,
                                    "threshold": str(part.threshold), "ok": part.ok}
    out["timings"] = {"total_s": round(time.perf_counter() - t0, 3)}
    _emit(out, None)


@cli.command()
@click.argument("report_file")
@click.option("--graph", "graph_file", default=None, help="Graph file, when the report does not embed one.")
@FORMAT
@ZERO
def verify(report_file, graph_file, fmt, zero_indexed):
    """Replay every certificate in a report; exit 1 if any fails."""
    from .decompose import PipelineConfig, verify_report

    try:
        with open(report_file) as fh:
            report = json.load(fh)
    except OSError as exc:
        raise CliExit(EXIT_NOINPUT, f"cannot read {report_file}: {exc}") from None
    except ValueError as exc:
        raise CliExit(EXIT_NOINPUT, f"{report_file} is not JSON: {exc}") from None
    if graph_file:
        g = load_graph(graph_file, fmt, zero_indexed)
    elif "graph" in report:
        g = graph_from_json(report["graph"])
    else:
        raise CliExit(EXIT_USAGE, "report has no embedded graph; pass --graph")
    command = report.get("command")
    try:
        if command == "decompose":
            solver = PipelineConfig.from_json(report.get("config", {})).solver
            errors = verify_report(report, g, solver)
        elif command == "ep":
            errors = _verify_ep(report, g)
        else:
            raise CliExit(EXIT_USAGE, f"cannot verify a {command!r} report")
    except (KeyError, TypeError, ValueError, GraphError) as exc:
        errors = [f"malformed report: {exc}"]
    if errors:
        for e in errors:
            click.echo(f"FAIL {e}", err=True)
        raise CliExit(EXIT_FAILED_CHECK)
    click.echo("OK")


def _verify_ep(report: dict, g: Graph):
    from .applications import CycleFamily, EPOutcome

    o = report["outcome"]
    fam = CycleFamily(report["params"].get("mod"))
    out = EPOutcome(o["kind"], o["k"], o["family"], o["strategy"], [tuple(c) for c in o["packing"]],
                    frozenset(o["cover"]), o.get("bound_used", {}))
    if out.family != fam.name:
        return ["family does not match the recorded modulus"]
    return [] if out.verify(g, fam) else [f"{out.kind} does not verify"]


@cli.command()
@click.argument("file")
@click.option("--k", "k", type=click.IntRange(min=1), required=True)
@click.option("--mod", "mod", type=click.IntRange(min=2), default=None, help="Only cycles of length 0 mod this.")
@click.option("--strategy", type=click.Choice(["thomassen", "divide-conquer"]), default="thomassen",
              show_default=True)
@click.option("--out", default=None)
@FORMAT
@ZERO
def ep(file, k, mod, strategy, out, fmt, zero_indexed):
    """k disjoint cycles, or a vertex set hitting every cycle."""
    from .applications import ep_cycles, ep_mod_cycles

    g = load_graph(file, fmt, zero_indexed)
    t0 = time.perf_counter()
    res = ep_cycles(g, k, strategy) if mod is None else ep_mod_cycles(g, k, mod, strategy)
    report = {"command": "ep", "params": {"k": k, "mod": mod, "strategy": strategy}, "seed": 0,
              "outcome": res.to_json(), "graph": graph_json(g),
              "timings": {"total_s": round(time.perf_counter() - t0, 3)}, "warnings": []}
    _emit(report, out)


@cli.command()
@click.option("--n", "n", type=click.IntRange(min=2), default=16, show_default=True)
@click.option("--rounds", type=click.IntRange(min=0), default=16, show_default=True)
@click.option("--seed", default="0", show_default=True)
def expander(n, rounds, seed):
    """Run the cut-matching game and report the measured expansion."""
    from .expander import cut_matching_game

    if n % 2:
        raise click.BadParameter("n must be even", param_hint="--n")
    s = _seed(seed)
    t0 = time.perf_counter()
    w = cut_matching_game(n, rounds, seed=s)
    report = {"command": "expander", "params": {"n": n, "rounds": rounds}, "seed": s,
              "outcome": {"expansion": str(w.expansion), "expansion_float": float(w.expansion),
                          "verification": w.verification_mode, "matchings": w.matchings},
              "timings": {"total_s": round(time.perf_counter() - t0, 3)}, "warnings": []}
    _emit(report, None)


def main(argv=None) -> int:
    """Entry point; maps failures to exit codes 1/2/3/64/66."""
    try:
        cli.main(args=argv, prog_name="twdecomp", standalone_mode=False)
    except CliExit as exc:
        if exc.msg:
            click.echo(exc.msg, err=True)
        return exc.code
    except click.UsageError as exc:
        exc.show()
        return EXIT_USAGE
    except click.exceptions.Abort:
        return EXIT_USAGE
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())

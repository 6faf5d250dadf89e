"""Command-line surface: solve, deflate, partition, oracle, sample, export-dot.

JSON reports are deterministic byte for byte (floats are rounded to 12
significant digits and the wall-clock fields are only emitted in text mode),
so they double as regression fixtures.

Exit codes: 0 success, 2 input error, 3 solver failure, 4 oracle disagreement.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from datetime import datetime, timezone

import numpy as np

from . import __version__
from .analysis import is_homogeneous, is_uniform, sample_tree
from .deflation import DeflationHierarchy, deflate, eta_from_hierarchy
from .errors import (
    CapExceededError,
    GraphError,
    InfeasiblePartitionError,
    NumericalError,
    OracleDisagreementError,
    SolverError,
    ToleranceError,
    TreemodError,
)
from .multigraph import Multigraph, from_edge_list
from .oracle import cross_check
from .partitions import LEVEL_GROUP_FACTOR, min_feasible_partition
from .solver import ModulusResult, SolverConfig, solve
from .trees import EdgeVector

SCHEMA_VERSION = 1

_DOT_STYLES = ("solid", "dashed", "dotted", "bold")
_DOT_COLORS = (
    "#1b9e77",
    "#d95f02",
    "#7570b3",
    "#e7298a",
    "#66a61e",
    "#e6ab02",
    "#a6761d",
    "#666666",
)


def _sig12(x: float) -> float:
    return float(f"{x:.12g}")


def _round_floats(obj):
    if isinstance(obj, float):
        return _sig12(obj)
    if isinstance(obj, dict):
        return {k: _round_floats(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_round_floats(v) for v in obj]
    return obj


def _graph_summary(g: Multigraph) -> dict:
    return {
        "vertices": g.n_vertices,
        "edges": g.n_edges,
        "edge_list": [[*g.endpoints(e)] for e in range(g.n_edges)],
    }


def _solve_report(g: Multigraph, result: ModulusResult, elapsed: float) -> dict:
    cert = is_homogeneous(g, result)
    uniform = is_uniform(g, result)
    return {
        "schema": SCHEMA_VERSION,
        "command": "solve",
        "graph": _graph_summary(g),
        "tolerance": result.config.tol,
        "mod2": result.mod2,
        "meo": 1.0 / result.mod2,
        "eta": [float(x) for x in result.eta.values],
        "rho": [float(x) for x in result.rho.values],
        "homogeneous": cert.homogeneous,
        "uniform": uniform,
        "pmf": [
            {"tree": list(t.edges), "probability": p}
            for t, p in sorted(result.pmf.items(), key=lambda kv: kv[0])
        ],
        "iterations": result.iterations,
        "worst_violation": result.worst_violation,
        "_timing_seconds": elapsed,
    }


def _deflate_report(g: Multigraph, h: DeflationHierarchy, elapsed: float) -> dict:
    body = h.to_json_dict()
    return {
        "schema": SCHEMA_VERSION,
        "command": "deflate",
        "graph": _graph_summary(g),
        "levels": body["levels"],
        "edge_levels": body["edge_levels"],
        "meo": body["meo"],
        "eta": [float(x) for x in eta_from_hierarchy(h).values],
        "terminal_vertex": body["terminal_vertex"],
        "_timing_seconds": elapsed,
    }


def _partition_report(g, result, feasible, elapsed: float) -> dict:
    return {
        "schema": SCHEMA_VERSION,
        "command": "partition",
        "graph": _graph_summary(g),
        "blocks": feasible.block_labels(g),
        "block_count": feasible.n_blocks,
        "cross_edges": list(feasible.cross_edges),
        "weight": float(feasible.weight),
        "weight_exact": f"{feasible.weight.numerator}/{feasible.weight.denominator}",
        "max_eta": float(result.eta.values.max()),
        "_timing_seconds": elapsed,
    }


def _emit(report: dict, fmt: str, out_path: str | None) -> None:
    if fmt == "json":
        cleaned = {k: v for k, v in report.items() if not k.startswith("_")}
        text = json.dumps(_round_floats(cleaned), indent=2) + "\n"
    else:
        lines = [f"# treemod {report.get('command', '')} at {datetime.now(timezone.utc).isoformat()}"]
        lines.extend(_text_lines(report))
        text = "\n".join(lines) + "\n"
    if out_path:
        with open(out_path, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _text_lines(obj, prefix: str = "") -> list[str]:
    lines = []
    if isinstance(obj, dict):
        for k, v in obj.items():
            key = k.lstrip("_")
            if isinstance(v, (dict, list)):
                lines.append(f"{prefix}{key}:")
                lines.extend(_text_lines(v, prefix + "  "))
            else:
                lines.append(f"{prefix}{key}: {v}")
    elif isinstance(obj, list):
        for v in obj:
            if isinstance(v, (dict, list)):
                lines.append(f"{prefix}-")
                lines.extend(_text_lines(v, prefix + "  "))
            else:
                lines.append(f"{prefix}- {v}")
    else:
        lines.append(f"{prefix}{obj}")
    return lines


def export_dot(g: Multigraph, usage, group_tol: float | None = None) -> str:
    """DOT rendering with edges bucketed by usage level.

    `usage` is an edge vector or a deflation hierarchy.  Buckets share a
    style/color pair; labels carry the usage value to 4 decimals.  Output is
    deterministic byte for byte.
    """
    if isinstance(usage, DeflationHierarchy):
        eta = eta_from_hierarchy(usage).values
    elif isinstance(usage, EdgeVector):
        eta = usage.values
    else:
        eta = np.asarray(usage, dtype=float)
    if eta.shape != (g.n_edges,):
        raise ValueError("usage vector length must match the edge count")
    if group_tol is None:
        top = float(eta.max()) if eta.size else 1.0
        group_tol = max(LEVEL_GROUP_FACTOR * 1e-8 * top, 1e-12)
    levels: list[float] = []
    bucket = np.empty(g.n_edges, dtype=int)
    for eid in np.argsort(-eta, kind="stable"):
        val = float(eta[eid])
        if not levels or levels[-1] - val > group_tol:
            levels.append(val)
        bucket[eid] = len(levels) - 1
    lines = ["graph usage {", "  node [shape=circle, fontsize=10];"]
    for label in g.vertices:
        lines.append(f'  "{label}";')
    for eid in range(g.n_edges):
        u, v = g.endpoints(eid)
        b = int(bucket[eid])
        style = _DOT_STYLES[b % len(_DOT_STYLES)]
        color = _DOT_COLORS[b % len(_DOT_COLORS)]
        lines.append(
            f'  "{u}" -- "{v}" [label="{eta[eid]:.4f}", style={style}, color="{color}"];'
        )
    lines.append("}")
    return "\n".join(lines) + "\n"


def _load_graph(path: str) -> Multigraph:
    try:
        with open(path) as fh:
            text = fh.read()
    except OSError as exc:
        raise GraphError(f"cannot read {path}: {exc}") from exc
    return from_edge_list(text)


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="treemod",
        description="Spanning-tree modulus, fair edge usage, and deflation for multigraphs",
    )
    parser.add_argument("--version", action="version", version=f"treemod {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, seed=False, cap=False):
        p.add_argument("--input", required=True, help="edge-list file")
        p.add_argument("--tol", type=float, default=1e-8, help="solver tolerance")
        p.add_argument("--max-iter", type=int, default=None, help="iteration cap")
        p.add_argument("--format", choices=("json", "text"), default="json")
        p.add_argument("--out", default=None, help="write the report here instead of stdout")
        if seed:
            p.add_argument("--seed", type=int, default=0, help="sampling seed")
        if cap:
            p.add_argument("--cap", type=int, default=2000, help="tree-enumeration cap")

    common(sub.add_parser("solve", help="modulus, overlap, usage, verdicts"))
    common(sub.add_parser("deflate", help="full core hierarchy"))
    common(sub.add_parser("partition", help="minimum feasible partition"))
    common(sub.add_parser("oracle", help="brute-force cross checks"), cap=True)
    common(sub.add_parser("sample", help="draw a tree from the optimal law"), seed=True)
    common(sub.add_parser("export-dot", help="DOT rendering colored by usage"))
    return parser


def run(argv) -> int:
    args = _build_parser().parse_args(argv)
    cfg = SolverConfig(tol=args.tol, max_iterations=args.max_iter)
    try:
        g = _load_graph(args.input)
        start = time.perf_counter()
        if args.command == "solve":
            result = solve(g, cfg)
            _emit(_solve_report(g, result, time.perf_counter() - start), args.format, args.out)
        elif args.command == "deflate":
            h = deflate(g, cfg)
            _emit(_deflate_report(g, h, time.perf_counter() - start), args.format, args.out)
        elif args.command == "partition":
            result = solve(g, cfg)
            feasible = min_feasible_partition(g, result)
            _emit(
                _partition_report(g, result, feasible, time.perf_counter() - start),
                args.format,
                args.out,
            )
        elif args.command == "oracle":
            report = cross_check(g, cap=args.cap, cfg=cfg, raise_on_failure=False)
            body = {
                "schema": SCHEMA_VERSION,
                "command": "oracle",
                **report.to_json_dict(),
                "_timing_seconds": time.perf_counter() - start,
            }
            _emit(body, args.format, args.out)
            if not report.all_passed:
                return 4
        elif args.command == "sample":
            result = solve(g, cfg)
            tree = sample_tree(result.pmf, args.seed)
            body = {
                "schema": SCHEMA_VERSION,
                "command": "sample",
                "graph": _graph_summary(g),
                "seed": args.seed,
                "tree": list(tree.edges),
                "tree_edges": [[*g.endpoints(e)] for e in tree.edges],
                "_timing_seconds": time.perf_counter() - start,
            }
            _emit(body, args.format, args.out)
        elif args.command == "export-dot":
            result = solve(g, cfg)
            text = export_dot(g, result.eta)
            if args.out:
                with open(args.out, "w") as fh:
                    fh.write(text)
            else:
                sys.stdout.write(text)
        else:  # pragma: no cover
            raise AssertionError(f"unhandled command {args.command}")
    except (GraphError, CapExceededError, InfeasiblePartitionError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (SolverError, NumericalError, ToleranceError) as exc:
        print(f"solver error: {exc}", file=sys.stderr)
        return 3
    except OracleDisagreementError as exc:
        print(f"oracle disagreement: {exc}", file=sys.stderr)
        return 4
    except TreemodError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 0


def main() -> None:
    sys.exit(run(sys.argv[1:]))


if __name__ == "__main__":
    main()

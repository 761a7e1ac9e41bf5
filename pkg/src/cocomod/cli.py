"""Command-line driver: generate, select-k, detect, evaluate, enrich, plot.

Exit codes: 0 success, 1 usage error, 2 data/processing error. All
randomness is governed by --seed; identical invocations produce
byte-identical artifacts. A JSON file passed through --config overrides any
flag of the same name.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from .bandwidth import select_k
from .comod import CoClustering, CoCommunitySet
from .evaluation import evaluate_recovery, fisher_enrichment, load_covariates
from .generator import GeneratorConfig, GroundTruth, sample_network
from .network import load_edge_list, write_edge_list, write_node_lists
from .spectral import spectral_coclustering
from .viz import order_for_visualization, render_heatmap


def _load_net(path: str):
    """Load an edge list, honoring `<path>.xnodes`/`<path>.ynodes` sidecars
    (written by `generate`) so isolated nodes and index order round-trip."""
    xside = Path(str(path) + ".xnodes")
    yside = Path(str(path) + ".ynodes")
    return load_edge_list(
        path,
        x_nodes=str(xside) if xside.exists() else None,
        y_nodes=str(yside) if yside.exists() else None,
    )


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _UsageError(message)


def _build_parser() -> _Parser:
    parser = _Parser(prog="cocomod", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    gen = sub.add_parser("generate", help="sample a planted network")
    gen.add_argument("--seed", type=int, required=True)
    gen.add_argument("--edges", required=True, help="output edge-list TSV path")
    gen.add_argument("--truth", required=True, help="output ground-truth JSON path")
    gen.add_argument("--m", type=int)
    gen.add_argument("--l", type=int)
    gen.add_argument("--kx", type=int)
    gen.add_argument("--ky", type=int)
    gen.add_argument("--t", type=int, help="number of planted co-communities")
    gen.add_argument("--theta-in", type=float)
    gen.add_argument("--theta-out", type=float)
    gen.add_argument("--config", help="generator config JSON (overrides flags)")

    sel = sub.add_parser("select-k", help="estimate group counts from the data")
    sel.add_argument("edges", help="edge-list TSV")
    sel.add_argument("--window", type=float, default=0.5)
    sel.add_argument("--out", help="write JSON here instead of stdout")
    sel.add_argument("--config")

    det = sub.add_parser("detect", help="spectral co-clustering + screening")
    det.add_argument("edges", help="edge-list TSV")
    det.add_argument("--kx", type=int)
    det.add_argument("--ky", type=int)
    det.add_argument("--restarts", type=int, default=250)
    det.add_argument("--alpha", type=float, default=0.05)
    det.add_argument("--seed", type=int, required=True)
    det.add_argument("--leverage", type=float, default=0.3)
    det.add_argument("--normalize-rows", action="store_true")
    det.add_argument("--out", help="write detection JSON here instead of stdout")
    det.add_argument("--trace-csv", help="also write the convergence trace CSV")
    det.add_argument("--config")

    ev = sub.add_parser("evaluate", help="score a detection against ground truth")
    ev.add_argument("--edges", required=True)
    ev.add_argument("--truth", required=True, help="ground-truth JSON from generate")
    ev.add_argument("--detection", required=True, help="detection JSON from detect")
    ev.add_argument("--out")
    ev.add_argument("--config")

    en = sub.add_parser("enrich", help="covariate enrichment of co-communities")
    en.add_argument("--edges", required=True)
    en.add_argument("--detection", required=True)
    en.add_argument("--covariates", required=True, help="node_id<TAB>group TSV")
    en.add_argument("--alpha", type=float, default=0.05)
    en.add_argument("--out")
    en.add_argument("--config")

    pl = sub.add_parser("plot", help="render the ordered adjacency heatmap SVG")
    pl.add_argument("edges")
    pl.add_argument("--detection", required=True)
    pl.add_argument("--cell-size", type=float, default=2.0)
    pl.add_argument("--max-nodes", type=int, default=2000)
    pl.add_argument("--downsample", action="store_true")
    pl.add_argument("--out")
    pl.add_argument("--config")
    return parser


def _apply_config(args: argparse.Namespace) -> argparse.Namespace:
    path = getattr(args, "config", None)
    if not path:
        return args
    doc = json.loads(Path(path).read_text(encoding="utf-8"))
    for key, value in doc.items():
        attr = key.replace("-", "_")
        if hasattr(args, attr):
            setattr(args, attr, value)
    return args


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text if text.endswith("\n") else text + "\n", encoding="utf-8")
    else:
        sys.stdout.write(text if text.endswith("\n") else text + "\n")


def _load_detection(path: str):
    doc = json.loads(Path(path).read_text(encoding="utf-8"))
    clustering = CoClustering(
        z_x=np.asarray(doc["z_x"], dtype=np.int64),
        z_y=np.asarray(doc["z_y"], dtype=np.int64),
        k_x=doc["k_x"],
        k_y=doc["k_y"],
        row_order=np.asarray(doc["row_order"], dtype=np.int64),
        col_order=np.asarray(doc["col_order"], dtype=np.int64),
    )
    cocommunities = CoCommunitySet.from_json(json.dumps(doc["cocommunities"]))
    return clustering, cocommunities, doc


def _run(args: argparse.Namespace) -> int:
    if args.command == "generate":
        overrides = {
            "m": args.m, "l": args.l, "k_x": args.kx, "k_y": args.ky,
            "T": args.t, "theta_in": args.theta_in, "theta_out": args.theta_out,
        }
        fields = {k: v for k, v in overrides.items() if v is not None}
        fields["seed"] = args.seed
        if args.config:
            doc = json.loads(Path(args.config).read_text(encoding="utf-8"))
            fields.update(doc)
            if "planted_pairs" in fields and fields["planted_pairs"] is not None:
                fields["planted_pairs"] = [tuple(p) for p in fields["planted_pairs"]]
        cfg = GeneratorConfig(**fields)
        net, truth = sample_network(cfg)
        write_edge_list(net, args.edges)
        write_node_lists(net, str(args.edges) + ".xnodes", str(args.edges) + ".ynodes")
        _emit(truth.to_json(), args.truth)
        return 0

    if args.command == "select-k":
        net = _load_net(args.edges)
        estimate = select_k(net, window=args.window)
        _emit(estimate.to_json(), args.out)
        return 0

    if args.command == "detect":
        net = _load_net(args.edges)
        k_x, k_y = args.kx, args.ky
        if k_x is None or k_y is None:
            estimate = select_k(net)
            k_x = k_x if k_x is not None else estimate.k_x
            k_y = k_y if k_y is not None else estimate.k_y
        report, cocommunities = spectral_coclustering(
            net,
            k_x,
            k_y,
            restarts=args.restarts,
            seed=args.seed,
            alpha=args.alpha,
            leverage_threshold=args.leverage,
            normalize_rows=args.normalize_rows,
        )
        doc = json.loads(report.to_json())
        doc["cocommunities"] = json.loads(cocommunities.to_json())
        _emit(json.dumps(doc, indent=2, sort_keys=True), args.out)
        if args.trace_csv:
            Path(args.trace_csv).write_text(report.trace_csv(), encoding="utf-8")
        return 0

    if args.command == "evaluate":
        net = _load_net(args.edges)
        truth = GroundTruth.from_json(Path(args.truth).read_text(encoding="utf-8"))
        clustering, cocommunities, _ = _load_detection(args.detection)
        report = evaluate_recovery(
            net, truth.z_x_true, truth.z_y_true, truth.planted_pairs,
            clustering, cocommunities,
        )
        _emit(report.to_json(), args.out)
        return 0

    if args.command == "enrich":
        net = _load_net(args.edges)
        clustering, cocommunities, _ = _load_detection(args.detection)
        covariates = load_covariates(args.covariates)
        report = fisher_enrichment(net, clustering, cocommunities, covariates, args.alpha)
        _emit(report.to_json(), args.out)
        return 0

    if args.command == "plot":
        net = _load_net(args.edges)
        clustering, cocommunities, _ = _load_detection(args.detection)
        perms = order_for_visualization(net, clustering, cocommunities)
        svg = render_heatmap(
            net, perms, clustering, cocommunities,
            cell_size=args.cell_size, max_nodes=args.max_nodes,
            downsample=args.downsample,
        )
        _emit(svg, args.out)
        return 0

    raise _UsageError(f"unknown command {args.command!r}")


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        args = _apply_config(args)
        return _run(args)
    except _UsageError as exc:
        sys.stderr.write(f"usage error: {exc}\n")
        return 1
    except (ValueError, OSError, json.JSONDecodeError, KeyError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 2


if __name__ == "__main__":
    sys.exit(main())

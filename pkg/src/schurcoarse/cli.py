"""Command-line entry point: ``coarsen``, ``embed``, ``verify``, ``eval``.

Exit codes: 0 success, 1 I/O or domain error, 2 usage error.  Every
subcommand validates its whole configuration before writing anything.
"""
from __future__ import annotations

import argparse
import json
import math
import sys
import warnings
from pathlib import Path
from typing import Sequence

import numpy as np

from .coarsen import CoarsenConfig, coarsen, parse_delta
from .embed import WalkParams, embed_graph, write_embedding
from .evalkit import link_prediction, stage_seeds, write_pairs, write_predictions
from .graph import apply_theta, read_edge_list, save_edge_list
from .synthetic import random_terminals
from .verify import CHECKS, run_check


class UsageError(Exception):
    pass


def read_terminals(path) -> list[int]:
    out = []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            try:
                out.append(int(line))
            except ValueError:
                raise ValueError(f"{path}: line {lineno}: not a vertex ID: {line!r}") from None
    return sorted(set(out))


def read_degrees(path) -> dict[int, float]:
    out = {}
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            parts = line.split()
            if len(parts) != 2:
                raise ValueError(f"{path}: line {lineno}: expected 'vertex degree'")
            out[int(parts[0])] = float(parts[1])
    return out


def write_degrees(degrees: dict[int, float], path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for v in sorted(degrees):
            fh.write(f"{v}\t{format(degrees[v], '.17g')}\n")


def _write_json(obj, path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(obj, fh, sort_keys=True, indent=2)
        fh.write("\n")


def _delta(text: str) -> float:
    try:
        return parse_delta(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _unit_open(text: str) -> float:
    x = float(text)
    if not 0.0 < x < 1.0:
        raise argparse.ArgumentTypeError(f"must lie strictly between 0 and 1, got {text}")
    return x


def _positive_int(text: str) -> int:
    x = int(text)
    if x < 1:
        raise argparse.ArgumentTypeError(f"must be a positive integer, got {text}")
    return x


def _require_file(path: str) -> None:
    if not Path(path).is_file():
        raise FileNotFoundError(f"no such file: {path}")


def _require_outdir(path: str) -> None:
    parent = Path(path).resolve().parent
    if not parent.is_dir():
        raise FileNotFoundError(f"output directory does not exist: {parent}")


# -- subcommands -----------------------------------------------------------
def cmd_coarsen(args) -> int:
    _require_file(args.input)
    _require_file(args.terminals)
    report_path = args.report or args.output + ".report.json"
    for p in (args.output, report_path, args.degrees_out):
        if p:
            _require_outdir(p)
    g = read_edge_list(args.input)
    T = read_terminals(args.terminals)
    degrees = {v: g.weighted_degree(v) for v in g.adj}
    if args.theta is not None:
        g = apply_theta(g, args.theta)
    cfg = CoarsenConfig(args.method, args.delta, args.seed)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        h, rep = coarsen(g, T, cfg, inplace=True)
    save_edge_list(h, args.output)
    report = rep.to_dict(timing=args.timing)
    report["theta"] = args.theta
    _write_json(report, report_path)
    if args.degrees_out:
        write_degrees({v: degrees[v] for v in h.adj}, args.degrees_out)
    return 0


def cmd_embed(args) -> int:
    if args.mode == "netmfsc" and not args.orig_degrees:
        raise UsageError("--mode netmfsc requires --orig-degrees")
    _require_file(args.input)
    if args.orig_degrees:
        _require_file(args.orig_degrees)
    _require_outdir(args.output)
    g = read_edge_list(args.input)
    if args.dim > g.n:
        raise ValueError(f"--dim {args.dim} exceeds vertex count {g.n}")
    params = WalkParams.geometric(args.theta, args.window)
    orig = read_degrees(args.orig_degrees) if args.orig_degrees else None
    emb = embed_graph(g, args.mode, params, args.dim, args.m_edges, orig)
    write_embedding(emb, args.output)
    return 0


_VERIFY_PARAMS = {
    "schur-oracle": ("n", "instances", "seed", "tol"),
    "expectation": ("n", "instances", "trials", "seed", "tol"),
    "inverse-identity": ("n", "instances", "seed", "tol"),
    "embedding-identity": ("n", "instances", "seed", "tol"),
    "sddm-closure": ("n", "instances", "seed", "tol"),
    "contraction-bounds": ("n", "instances", "seed"),
    "contraction-scaling": ("seed",),
}
DEFAULT_CHECKS = [c for c in CHECKS if c != "contraction-scaling"]


def cmd_verify(args) -> int:
    names = args.check or DEFAULT_CHECKS
    if args.output:
        _require_outdir(args.output)
    lines = []
    ok = True
    for name in names:
        kwargs = {
            k: getattr(args, k) for k in _VERIFY_PARAMS[name] if getattr(args, k) is not None
        }
        rep = run_check(name, **kwargs)
        ok &= rep.passed
        lines.append(rep.to_json())
        status = "PASS" if rep.passed else "FAIL"
        print(f"{status} {name}", file=sys.stderr)
    text = "\n".join(lines) + "\n"
    if args.output:
        with open(args.output, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0 if ok else 1


def cmd_eval(args) -> int:
    _require_file(args.input)
    if args.terminals:
        _require_file(args.terminals)
    for p in (args.report, args.predictions, args.positives, args.negatives):
        if p:
            _require_outdir(p)
    g = read_edge_list(args.input)
    if args.terminals:
        T = read_terminals(args.terminals)
    else:
        T = random_terminals(g, args.terminal_fraction, stage_seeds(args.seed)["terminals"], 2)
    method = None if args.method == "none" else args.method
    report, preds, split = link_prediction(
        g,
        T,
        seed=args.seed,
        ratio=args.ratio,
        method=method,
        delta=args.delta,
        window=args.window,
        theta=args.theta,
        dim=args.dim,
        operator=args.operator,
        test_fraction=args.test_fraction,
    )
    report["terminals"] = len(T)
    if args.report:
        _write_json(report, args.report)
    else:
        sys.stdout.write(json.dumps(report, sort_keys=True) + "\n")
    if args.predictions:
        write_predictions(preds, args.predictions)
    if args.positives:
        write_pairs(split.positives, args.positives)
    if args.negatives:
        write_pairs(split.negatives, args.negatives)
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="schurcoarse", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    c = sub.add_parser("coarsen", help="reduce a graph onto a terminal set")
    c.add_argument("--input", required=True)
    c.add_argument("--terminals", required=True, help="one vertex ID per line")
    c.add_argument("--output", required=True)
    c.add_argument("--method", choices=("schur", "contract"), default="schur")
    c.add_argument("--delta", type=_delta, default=30, help="degree threshold or 'inf'")
    c.add_argument("--seed", type=int, default=0)
    c.add_argument("--theta", type=_unit_open, default=None,
                   help="coarsen D - theta*A instead of the graph itself")
    c.add_argument("--report", help="JSON run report (default: OUTPUT.report.json)")
    c.add_argument("--degrees-out", help="write original weighted degrees of kept vertices")
    c.add_argument("--timing", action="store_true", help="include wall time in the report")
    c.set_defaults(func=cmd_coarsen)

    e = sub.add_parser("embed", help="NetMF / NetMFSC embedding")
    e.add_argument("--input", required=True)
    e.add_argument("--output", required=True)
    e.add_argument("--mode", choices=("netmf", "netmfsc"), default="netmf")
    e.add_argument("--window", type=_positive_int, default=10)
    e.add_argument("--theta", type=_unit_open, default=0.5)
    e.add_argument("--dim", type=_positive_int, default=128)
    e.add_argument("--m-edges", type=float, default=None,
                   help="log+ scale (default: edge count of the input)")
    e.add_argument("--orig-degrees", help="'vertex degree' lines of the original graph")
    e.set_defaults(func=cmd_embed)

    v = sub.add_parser("verify", help="run oracle checks, JSONL to stdout or --output")
    v.add_argument("--check", action="append", choices=sorted(CHECKS))
    v.add_argument("--n", type=_positive_int, default=None)
    v.add_argument("--instances", type=_positive_int, default=None)
    v.add_argument("--trials", type=_positive_int, default=None)
    v.add_argument("--seed", type=int, default=None)
    v.add_argument("--tol", type=float, default=None)
    v.add_argument("--output")
    v.set_defaults(func=cmd_verify)

    ev = sub.add_parser("eval", help="terminal link prediction AUC")
    ev.add_argument("--input", required=True)
    ev.add_argument("--terminals")
    ev.add_argument("--terminal-fraction", type=_unit_open, default=0.5)
    ev.add_argument("--ratio", type=_unit_open, default=0.5)
    ev.add_argument("--method", choices=("schur", "contract", "none"), default="contract")
    ev.add_argument("--delta", type=_delta, default=math.inf)
    ev.add_argument("--window", type=_positive_int, default=1)
    ev.add_argument("--theta", type=_unit_open, default=0.5)
    ev.add_argument("--dim", type=_positive_int, default=128)
    ev.add_argument("--operator", choices=("hadamard", "weighted_l2"), default="hadamard")
    ev.add_argument("--test-fraction", type=_unit_open, default=0.5)
    ev.add_argument("--seed", type=int, default=0)
    ev.add_argument("--report")
    ev.add_argument("--predictions")
    ev.add_argument("--positives")
    ev.add_argument("--negatives")
    ev.set_defaults(func=cmd_eval)
    return p


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"{parser.prog}: error: {exc}", file=sys.stderr)
        return 2
    except (OSError, ValueError, KeyError, RuntimeError, np.linalg.LinAlgError) as exc:
        print(f"{parser.prog}: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())

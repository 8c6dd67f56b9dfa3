"""Command-line entry point.

Exit codes: 0 success, 1 usage error, 2 invalid input, 3 internal invariant
violation. Every randomized command takes ``--seed``; the default is a fixed
constant, so repeated runs are byte-identical.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import asdict
from pathlib import Path

from . import fileio
from .aggregation import METHODS, aggregate
from .errors import InputError, InvariantViolation, SchemaError
from .experiments import run_group_experiment
from .ga import GaConfig, compare_methods, model_vector_presets, run_ga, sweep
from .pcm import Kind, all_pairs
from .robustness import DEFAULT_SEED, vertex_oracle
from .trees import count_trees, trees_for

SWEEP_COLUMNS = ("preset", "kind", "method", "delta", "Delta", "generations", "evaluations")
GROUP_COLUMNS = ("combinationIndex", "memberIds", "method", "meanError")
REPORT_COLUMNS = ("preset", "delta", "ordinary", "weighted", "weighted_minus_ordinary",
                  "weighted_more_stable")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(f"{self.prog}: error: {message}")


def _progress(args, msg):
    if not args.quiet:
        print(msg, file=sys.stderr)


def _manifest(args, command, params, inputs=()):
    m = fileio.RunManifest(command, params, getattr(args, "seed", None))
    for p in inputs:
        if p is not None:
            m.input_digests[str(p)] = fileio.file_digest(p)
    return m


def _upper_dict(pcm):
    return [{"u": u, "v": v, "value": float(pcm.values[(u, v)])} for u, v in all_pairs(pcm.n)]


def cmd_aggregate(args):
    exam = fileio.parse_examination(args.input)
    report = aggregate(exam, args.method)
    for label, w in zip(exam.object_labels, report.vector):
        print(f"{label}\t{fileio.format_float(w)}")
    if args.out:
        result = {
            "method": args.method,
            "kind": exam.kind.value,
            "objects": list(exam.object_labels),
            "weights": list(report.vector),
            "T": report.total_trees,
            "rated_vectors": report.rated_vectors,
            "rating_sum": report.rating_sum,
            "tree_counts": {j.expert_id: t for j, t in zip(exam.judgments, report.tree_counts)},
        }
        fileio.emit_json(result, args.out)
        _manifest(args, "aggregate", {"method": args.method}, [args.input]).write_beside(args.out)
    return 0


def _read_edges(path):
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise SchemaError(f"{path}: {exc.strerror}") from None
    try:
        raw = json.loads(text)
        return [(int(u), int(v)) for u, v in raw]
    except (json.JSONDecodeError, TypeError, ValueError):
        pass
    edges = []
    for token in text.replace(",", " ").split():
        try:
            u, v = token.split("-")
            edges.append((int(u), int(v)))
        except ValueError:
            raise SchemaError(f"{path}: cannot parse edge {token!r}; expected 'u-v'") from None
    return edges


def cmd_trees(args):
    if args.n < 2:
        raise InputError("--n must be >= 2")
    edges = _read_edges(args.edges) if args.edges else None
    if args.count_only:
        full = edges if edges is not None else all_pairs(args.n)
        print(count_trees(args.n, full))
        return 0
    for tree in trees_for(args.n, edges):
        print(tree)
    return 0


def cmd_oracle(args):
    truth = fileio.parse_truth(args.truth, args.kind)
    result = vertex_oracle(truth, args.delta, args.method)
    print(f"Delta\t{fileio.format_float(result.delta_max)}")
    print(f"evaluations\t{result.evaluations}")
    if args.out:
        fileio.emit_json({
            "method": args.method,
            "kind": truth.kind.value,
            "delta": args.delta,
            "Delta": result.delta_max,
            "evaluations": result.evaluations,
            "argmax": _upper_dict(result.argmax_matrix),
        }, args.out)
        _manifest(args, "oracle", {"delta": args.delta, "method": args.method,
                                   "kind": truth.kind.value}, [args.truth]).write_beside(args.out)
    return 0


def _ga_config(args):
    cfg = {}
    if args.config:
        cfg = fileio.load_json(args.config)
        if not isinstance(cfg, dict):
            raise SchemaError(f"{args.config}: expected an object")
    if args.seed is not None:
        cfg["seed"] = args.seed
    cfg.setdefault("seed", DEFAULT_SEED)
    config = GaConfig.from_dict(cfg)
    args.seed = config.seed
    return config


def cmd_ga(args):
    truth = fileio.parse_truth(args.truth, args.kind)
    config = _ga_config(args)
    result = run_ga(truth, args.delta, args.method, config)
    print(f"Delta\t{fileio.format_float(result.delta_max)}")
    print(f"generations\t{result.generations}")
    print(f"evaluations\t{result.evaluations}")
    if args.out:
        fileio.emit_json({
            "method": args.method,
            "kind": truth.kind.value,
            "delta": args.delta,
            "Delta": result.delta_max,
            "generations": result.generations,
            "evaluations": result.evaluations,
            "history": list(result.history),
            "argmax": _upper_dict(result.argmax_matrix),
        }, args.out)
        _manifest(args, "ga", {"delta": args.delta, "method": args.method,
                               "config": asdict(config)}, [args.truth, args.config]).write_beside(args.out)
    return 0


def _grid(lo, hi, step):
    if step <= 0 or hi < lo:
        raise InputError("need --step > 0 and --delta-max >= --delta-min")
    count = int(round((hi - lo) / step)) + 1
    return [round(lo + i * step, 10) for i in range(count) if lo + i * step <= hi + 1e-9]


def cmd_sweep(args):
    config = _ga_config(args)
    kind = Kind.parse(args.kind)
    presets = model_vector_presets(args.n, kind)
    names = list(presets) if args.truth_preset == "all" else args.truth_preset.split(",")
    for name in names:
        if name not in presets:
            raise InputError(f"unknown preset {name!r}; choose from {', '.join(presets)} or 'all'")
    methods = args.methods.split(",")
    grid = _grid(args.delta_min, args.delta_max, args.step)
    rows, report = [], []
    for name in names:
        _progress(args, f"sweep: preset {name}")
        result = sweep(presets[name], grid, methods, config, exact=args.exact,
                       label=name, threads=args.threads)
        for p in result.points:
            rows.append({"preset": name, "kind": kind.value, "method": p.method, "delta": p.delta,
                         "Delta": p.Delta, "generations": p.generations,
                         "evaluations": p.evaluations})
        report.extend(compare_methods(result))
    fileio.emit_csv(rows, args.out, SWEEP_COLUMNS)
    params = {"presets": names, "n": args.n, "kind": kind.value, "grid": grid,
              "methods": methods, "exact": args.exact, "config": asdict(config)}
    _manifest(args, "sweep", params, [args.config]).write_beside(args.out)
    if args.report:
        fileio.emit_csv(report, args.report, REPORT_COLUMNS)
    if not args.quiet:
        for r in report:
            print(f"{r['preset']}\tdelta={fileio.format_float(r['delta'])}\t"
                  f"ordinary={fileio.format_float(r['ordinary'])}\t"
                  f"weighted={fileio.format_float(r['weighted'])}")
    return 0


def cmd_group_eval(args):
    corpus = fileio.parse_corpus(args.corpus)
    methods = args.methods.split(",")
    for m in methods:
        if m not in METHODS:
            raise InputError(f"unknown method {m!r}")
    _progress(args, f"group-eval: {corpus.size} sessions, groups of {args.group_size}")
    summary = run_group_experiment(corpus, args.group_size, methods)
    rows = [{"combinationIndex": r.combination_index, "memberIds": ";".join(r.member_ids),
             "method": r.method, "meanError": r.mean_error} for r in summary.rows]
    fileio.emit_csv(rows, args.out, GROUP_COLUMNS)
    inputs = [args.corpus]
    _manifest(args, "group-eval", {"group_size": args.group_size, "methods": methods},
              inputs).write_beside(args.out)
    block = {
        "combinationCount": summary.combination_count,
        "groupSize": summary.group_size,
        "methods": {m: {"maxError": s.max_error, "minError": s.min_error, "meanError": s.mean_error}
                    for m, s in summary.methods.items()},
    }
    if args.summary_out:
        fileio.emit_json(block, args.summary_out)
    print(f"combinations\t{summary.combination_count}")
    for m, s in summary.methods.items():
        print(f"{m}\tmax={fileio.format_float(s.max_error)}\tmin={fileio.format_float(s.min_error)}"
              f"\tmean={fileio.format_float(s.mean_error)}")
    return 0


def cmd_presets(args):
    for name, truth in model_vector_presets(args.n, args.kind).items():
        print(f"{name}\t" + ",".join(fileio.format_float(w) for w in truth.weights))
    return 0


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--seed", type=int, default=None,
                        help=f"master seed (default {DEFAULT_SEED})")
    common.add_argument("--threads", type=int, default=1, help="parallelism cap, 0 = auto")
    common.add_argument("--quiet", action="store_true", help="suppress progress output")

    parser = _Parser(prog="combagg", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("aggregate", parents=[common], help="aggregate an examination file")
    p.add_argument("--input", required=True)
    p.add_argument("--method", choices=METHODS, default="ordinary")
    p.add_argument("--out")
    p.set_defaults(func=cmd_aggregate)

    p = sub.add_parser("trees", parents=[common], help="enumerate or count spanning trees")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--edges", help="JSON list of [u, v] pairs or 'u-v' tokens")
    p.add_argument("--count-only", action="store_true")
    p.set_defaults(func=cmd_trees)

    kinds = ["mult", "add", "multiplicative", "additive"]
    p = sub.add_parser("oracle", parents=[common], help="exhaustive vertex worst case (n <= 5)")
    p.add_argument("--truth", required=True)
    p.add_argument("--delta", type=float, required=True)
    p.add_argument("--method", choices=METHODS, required=True)
    p.add_argument("--kind", choices=kinds)
    p.add_argument("--out")
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("ga", parents=[common], help="genetic worst-case search")
    p.add_argument("--truth", required=True)
    p.add_argument("--delta", type=float, required=True)
    p.add_argument("--method", choices=METHODS, required=True)
    p.add_argument("--kind", choices=kinds)
    p.add_argument("--config")
    p.add_argument("--out")
    p.set_defaults(func=cmd_ga)

    p = sub.add_parser("sweep", parents=[common], help="worst case over a delta grid")
    p.add_argument("--truth-preset", required=True, help="preset name, comma list, or 'all'")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--delta-min", type=float, required=True)
    p.add_argument("--delta-max", type=float, required=True)
    p.add_argument("--step", type=float, required=True)
    p.add_argument("--methods", default="ordinary,weighted")
    p.add_argument("--kind", choices=kinds, default="mult")
    p.add_argument("--exact", action="store_true", help="vertex oracle instead of GA when n <= 5")
    p.add_argument("--config")
    p.add_argument("--out", required=True)
    p.add_argument("--report", help="CSV comparing the methods per grid point")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("group-eval", parents=[common], help="evaluate all expert-group combinations")
    p.add_argument("--corpus", required=True)
    p.add_argument("--group-size", type=int, required=True)
    p.add_argument("--methods", default="ordinary,weighted")
    p.add_argument("--out", required=True)
    p.add_argument("--summary-out")
    p.set_defaults(func=cmd_group_eval)

    p = sub.add_parser("presets", parents=[common], help="list model weight presets")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--kind", choices=kinds, default="mult")
    p.set_defaults(func=cmd_presets)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return 1
    except SystemExit as exc:   # --help
        return int(exc.code or 0)
    try:
        return args.func(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (InvariantViolation, AssertionError) as exc:
        print(f"internal error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())

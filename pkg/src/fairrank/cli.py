"""``fairrank`` command line.

Exit codes: 0 success, 1 I/O or data failure, 2 usage error, 3 golden-table mismatch.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import replace
from pathlib import Path

from .errors import CutoffError, FairRankError, NormalizerZeroError, ParseError, UndefinedMetricError, ValidationError
from .experiments import (
    RUN_SWEEPS,
    SYNTHETIC_SWEEPS,
    SweepConfig,
    load_run_file,
    rank_by_relevance,
    write_csv,
    write_json,
)
from .metrics import DEFAULT_CONFIG, METRIC_NAMES, Cutoffs, LogBase, MetricConfig, NormalizerMode, evaluate_metric, get_metric
from .core import Ranking
from .properties import BUDGETS, PropertyId, golden_mismatches, render_text, satisfaction_table, to_json

EXIT_OK, EXIT_DATA, EXIT_USAGE, EXIT_GOLDEN = 0, 1, 2, 3

_GLOBAL_FLAGS = ("seed", "log_base", "cutoffs", "normalizer")


class UsageError(Exception):
    pass


def _add_global_flags(p: argparse.ArgumentParser, suppress: bool) -> None:
    default = argparse.SUPPRESS if suppress else None
    g = p.add_argument_group("shared options")
    g.add_argument("--seed", type=int, default=default, help="random seed (default 0)")
    g.add_argument("--log-base", choices=[b.value for b in LogBase], default=default,
                   help="logarithm inside KL/JS terms (default base2)")
    g.add_argument("--cutoffs", default=default, metavar="SPEC",
                   help="prefix-metric cut-offs: comma list (1,5,10) or step:K (default step:10)")
    g.add_argument("--normalizer", choices=[m.value for m in NormalizerMode], default=default,
                   help="prefix normalizer: brute, extreme, exact, or auto (default: brute for n<=8, else extreme)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="fairrank", description="Group-fairness metrics for rankings.")
    _add_global_flags(parser, suppress=False)
    sub = parser.add_subparsers(dest="command", required=True)

    metrics = sub.add_parser("metrics", help="evaluate metrics").add_subparsers(dest="action", required=True)
    compute = metrics.add_parser("compute", help="score one query of a run file")
    compute.add_argument("--run", required=True, type=Path, help="CSV: query_id,candidate_id,group,relevance")
    compute.add_argument("--query", required=True)
    compute.add_argument("--metric", action="append", default=None,
                         help="metric name, comma list, or 'all' (repeatable; default all)")
    compute.add_argument("--order", choices=("relevance", "file"), default="relevance",
                         help="rank by relevance (ties by id) or keep the file order")
    _add_global_flags(compute, suppress=True)
    compute.set_defaults(func=cmd_metrics_compute)

    props = sub.add_parser("properties", help="axiomatic property checks").add_subparsers(dest="action", required=True)
    check = props.add_parser("check", help="run property checkers and print the verdict table")
    check.add_argument("--metric", action="append", default=None, help="restrict to metrics (repeatable, comma list)")
    check.add_argument("--property", action="append", default=None, help="restrict to properties, e.g. P4 or 4")
    check.add_argument("--budget", choices=sorted(BUDGETS), default="default")
    check.add_argument("--golden", action="store_true", help="compare against the expected table; exit 3 on mismatch")
    check.add_argument("--json", metavar="PATH", help="also write the verdicts as JSON ('-' for stdout)")
    check.add_argument("--details", action="store_true", help="print every verdict with its counterexample")
    _add_global_flags(check, suppress=True)
    check.set_defaults(func=cmd_properties_check)

    exps = sub.add_parser("experiments", help="plot-data sweeps").add_subparsers(dest="action", required=True)
    run = exps.add_parser("run", help="run one sweep and write CSV")
    run.add_argument("sweep", choices=sorted(SYNTHETIC_SWEEPS) + sorted(RUN_SWEEPS))
    run.add_argument("-o", "--output", required=True, type=Path, help="CSV output path ('-' for stdout)")
    run.add_argument("--json", type=Path, help="optional JSON mirror of the rows")
    run.add_argument("--run", dest="run_file", type=Path, help="run file for translation/rescaling")
    run.add_argument("--queries", help="comma-separated query ids (default: all queries in the run file)")
    run.add_argument("--grid", help="comma-separated c (translation) or a (rescaling) values")
    run.add_argument("--order", choices=("relevance", "file"), default="relevance")
    _add_global_flags(run, suppress=True)
    run.set_defaults(func=cmd_experiments_run)
    return parser


def _metric_config(args) -> MetricConfig:
    cfg = DEFAULT_CONFIG
    try:
        if args.cutoffs:
            cfg = replace(cfg, cutoffs=Cutoffs.parse(args.cutoffs))
    except ValueError as exc:
        raise UsageError(f"bad --cutoffs {args.cutoffs!r}: {exc}") from None
    if args.log_base:
        cfg = replace(cfg, log_base_divergence=LogBase(args.log_base))
    if args.normalizer:
        cfg = replace(cfg, normalizer_mode=NormalizerMode(args.normalizer))
    return cfg


def _split(values) -> list[str]:
    return [v.strip() for item in values or [] for v in item.split(",") if v.strip()]


def _metric_names(values) -> list[str]:
    names = _split(values)
    if not names or any(n.lower() == "all" for n in names):
        return list(METRIC_NAMES)
    try:
        return [get_metric(n).name for n in names]
    except KeyError as exc:
        raise UsageError(exc.args[0]) from None


def _fmt(v) -> str:
    return repr(v) if isinstance(v, float) else str(v)


def cmd_metrics_compute(args) -> int:
    cfg = _metric_config(args)
    names = _metric_names(args.metric)
    run = load_run_file(args.run)
    pop = run.population(args.query)
    r = Ranking.from_ids(pop, run.file_order(args.query)) if args.order == "file" else rank_by_relevance(pop)
    for name in names:
        try:
            value = _fmt(evaluate_metric(name, pop, r, cfg))
        except (UndefinedMetricError, NormalizerZeroError):
            value = "undefined"
        except CutoffError as exc:
            raise UsageError(str(exc)) from None
        print(f"{name},{value}")
    return EXIT_OK


def cmd_properties_check(args) -> int:
    budget = BUDGETS[args.budget]
    if args.seed is not None:
        budget = budget.with_seed(args.seed)
    cfg = _metric_config(args)
    budget = budget.with_config(cfg)
    if args.cutoffs:
        budget = replace(budget, small_cutoffs=cfg.cutoffs, grid_cutoffs=cfg.cutoffs)
    metrics = _metric_names(args.metric)
    try:
        props = [PropertyId.parse(p) for p in _split(args.property)] or list(PropertyId)
    except KeyError as exc:
        raise UsageError(exc.args[0]) from None
    table = satisfaction_table(budget, metrics, props)
    print(render_text(table))
    cells = [v for row in table.values() for v in row.values()]
    if args.details or len(cells) <= 3:
        for v in cells:
            print()
            print(v.summary())
    if args.json:
        text = to_json(table, budget)
        if args.json == "-":
            print(text)
        else:
            Path(args.json).write_text(text + "\n", encoding="utf-8")
    if args.golden:
        bad = golden_mismatches(table)
        if bad:
            print(f"\ngolden mismatch in {len(bad)} of {len(cells)} cells:", file=sys.stderr)
            for v in bad:
                print(f"  {v.metric} {v.prop.name}: got {v.status.value}, expected {v.expected.value}",
                      file=sys.stderr)
            return EXIT_GOLDEN
        print(f"\nall {len(cells)} cells match the expected table")
    return EXIT_OK


def _floats(text: str) -> list[float]:
    try:
        return [float(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise UsageError(f"bad --grid {text!r}") from None


def cmd_experiments_run(args) -> int:
    mcfg = _metric_config(args)
    scfg = SweepConfig(metric_config=mcfg, seed=args.seed or 0)
    if args.cutoffs:
        scfg = replace(scfg, closeness_cutoffs=mcfg.cutoffs)
    if args.sweep in SYNTHETIC_SWEEPS:
        if args.run_file or args.queries or args.grid:
            raise UsageError(f"--run/--queries/--grid do not apply to the {args.sweep} sweep")
        rows = list(SYNTHETIC_SWEEPS[args.sweep](scfg))
    else:
        if args.run_file is None:
            raise UsageError(f"the {args.sweep} sweep needs --run")
        grid = _floats(args.grid) if args.grid else None
        run = load_run_file(args.run_file)
        queries = [q.strip() for q in args.queries.split(",") if q.strip()] if args.queries else None
        try:
            rows = list(RUN_SWEEPS[args.sweep](run, queries, grid, scfg, args.order))
        except ValueError as exc:
            if isinstance(exc, FairRankError):
                raise
            raise UsageError(str(exc)) from None
    if str(args.output) == "-":
        write_csv(rows, sys.stdout)
    else:
        with args.output.open("w", newline="", encoding="utf-8") as fh:
            write_csv(rows, fh)
    if args.json:
        with args.json.open("w", encoding="utf-8") as fh:
            write_json(rows, fh)
    return EXIT_OK


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    for flag in _GLOBAL_FLAGS:
        if not hasattr(args, flag):
            setattr(args, flag, None)
    try:
        return args.func(args)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"fairrank: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ParseError, ValidationError) as exc:
        print(f"fairrank: {exc}", file=sys.stderr)
        return EXIT_DATA
    except KeyError as exc:
        print(f"fairrank: {exc.args[0]}", file=sys.stderr)
        return EXIT_DATA
    except OSError as exc:
        print(f"fairrank: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())

"""Benchmark, prediction, and trace commands.

``treelab benchmark`` sweeps fold counts and writes a per-(algorithm, k)
metrics report plus a plot-data file.  ``treelab predict`` writes class
probabilities for an unlabeled CSV.  ``treelab trace`` dumps the node-visit
sequence of one run.  The ``TREELAB_SEED`` environment variable overrides
``--seed`` everywhere.
"""

from __future__ import annotations

import argparse
import csv
import os
import sys
from pathlib import Path

import numpy as np

from .bench import ALGORITHMS, run_cv
from .dataset import (
    DatasetError,
    SchemaMismatchError,
    load_csv,
    load_prediction_rows,
)
from .splitcore import SplitParams
from .trace import TRACE_HEADER, format_trace_line

EXIT_DATASET_ERROR = 10
EXIT_BAD_PARAMS = 11
EXIT_OUTPUT_ERROR = 12
EXIT_SCHEMA_MISMATCH = 13
EXIT_TRACE_GUARDRAIL = 14

TRACE_LINE_LIMIT = 10_000

REPORT_COLUMNS = [
    "dataset", "algorithm", "k", "b", "c", "d", "seed",
    "cpu_seconds", "nodes_explored", "peak_stack_words", "model_words", "accuracy",
]
PLOT_COLUMNS = [
    "dataset", "algorithm", "k", "cpu_seconds", "nodes_explored",
    "peak_stack_words_mean", "peak_stack_words_max",
]


class CliError(Exception):
    def __init__(self, message: str, exit_code: int):
        super().__init__(message)
        self.exit_code = exit_code


def parse_fold_spec(spec: str, n_rows: int) -> list[int]:
    """Parse a fold list like ``10`` / ``2,5,10`` / ``10:400:10`` (inclusive)."""
    folds: list[int] = []
    for token in spec.split(","):
        token = token.strip()
        try:
            if ":" in token:
                start, stop, step = (int(part) for part in token.split(":"))
                if step <= 0:
                    raise ValueError
                folds.extend(range(start, stop + 1, step))
            else:
                folds.append(int(token))
        except ValueError:
            raise CliError(f"bad fold spec {token!r}", EXIT_BAD_PARAMS) from None
    for k in folds:
        if not 2 <= k <= n_rows:
            raise CliError(
                f"fold count {k} out of range [2, {n_rows}]", EXIT_BAD_PARAMS
            )
    return folds


def parse_algorithms(spec: str) -> list[str]:
    names = [token.strip() for token in spec.split(",") if token.strip()]
    if not names:
        raise CliError("no algorithms selected", EXIT_BAD_PARAMS)
    for name in names:
        if name not in ALGORITHMS:
            raise CliError(
                f"unknown algorithm {name!r}; choose from {sorted(ALGORITHMS)}",
                EXIT_BAD_PARAMS,
            )
    return names


def resolve_seed(seed: int) -> int:
    env = os.environ.get("TREELAB_SEED")
    if env is None:
        return seed
    try:
        return int(env)
    except ValueError:
        raise CliError(f"TREELAB_SEED must be an integer, got {env!r}", EXIT_BAD_PARAMS) from None


def make_params(args) -> SplitParams:
    try:
        return SplitParams(min_count=args.min_count, max_depth=args.max_depth)
    except ValueError as exc:
        raise CliError(str(exc), EXIT_BAD_PARAMS) from None


def _write_csv(path, header, rows) -> None:
    try:
        with open(path, "w", newline="") as handle:
            writer = csv.writer(handle, lineterminator="\n")
            writer.writerow(header)
            writer.writerows(rows)
    except OSError as exc:
        raise CliError(f"cannot write {path}: {exc}", EXIT_OUTPUT_ERROR) from exc


def _write_text(path, lines) -> None:
    try:
        with open(path, "w") as handle:
            handle.write("\n".join(lines) + "\n")
    except OSError as exc:
        raise CliError(f"cannot write {path}: {exc}", EXIT_OUTPUT_ERROR) from exc


def plot_path(out: Path) -> Path:
    return out.with_name(out.stem + "_plot" + (out.suffix or ".csv"))


def cmd_benchmark(args) -> int:
    data = load_csv(args.dataset, has_header=not args.no_header)
    algorithms = parse_algorithms(args.algorithms)
    ks = parse_fold_spec(args.folds, data.n_rows)
    params = make_params(args)
    seed = resolve_seed(args.seed)

    report_rows = []
    plot_rows = []
    for k in ks:
        for name in algorithms:
            result = run_cv(data, name, k, args.bootstraps, params, seed, jobs=args.jobs)
            cpu = result.metrics.cpu_seconds if args.timing == "cpu" else 0.0
            report_rows.append([
                data.name, result.algorithm, k, args.bootstraps,
                params.min_count, params.max_depth, seed,
                repr(cpu), result.metrics.nodes_explored,
                result.metrics.peak_stack_words, result.metrics.model_words,
                repr(result.accuracy),
            ])
            plot_rows.append([
                data.name, result.algorithm, k, repr(cpu),
                result.metrics.nodes_explored,
                repr(float(np.mean(result.fold_peaks))),
                max(result.fold_peaks),
            ])
    out = Path(args.out)
    _write_csv(out, REPORT_COLUMNS, report_rows)
    _write_csv(plot_path(out), PLOT_COLUMNS, plot_rows)
    return 0


def cmd_predict(args) -> int:
    train = load_csv(args.train, has_header=not args.no_header)
    test_matrix = load_prediction_rows(train, args.test, has_header=not args.no_header)
    if test_matrix.shape[0] == 0:
        raise CliError(f"{args.test}: no usable test rows", EXIT_DATASET_ERROR)
    params = make_params(args)
    seed = resolve_seed(args.seed)
    _, fit = ALGORITHMS[args.algorithm]
    matrix, _ = fit(train, train.all_rows(), test_matrix, args.bootstraps, params, seed)
    header = [f"prob_{name}" for name in train.class_names] + ["prediction"]
    rows = [
        [repr(float(p)) for p in matrix[j]] + [train.class_names[int(np.argmax(matrix[j]))]]
        for j in range(matrix.shape[0])
    ]
    _write_csv(Path(args.out), header, rows)
    return 0


def cmd_trace(args) -> int:
    train = load_csv(args.train, has_header=not args.no_header)
    test_matrix = load_prediction_rows(train, args.test, has_header=not args.no_header)
    if test_matrix.shape[0] == 0:
        raise CliError(f"{args.test}: no usable test rows", EXIT_DATASET_ERROR)
    params = make_params(args)
    seed = resolve_seed(args.seed)
    _, fit = ALGORITHMS[args.algorithm]
    events = []
    fit(
        train, train.all_rows(), test_matrix, args.bootstraps, params, seed,
        on_visit=events.append,
    )
    if len(events) > TRACE_LINE_LIMIT and not args.force:
        raise CliError(
            f"trace would hold {len(events)} lines (> {TRACE_LINE_LIMIT});"
            " pass --force to write it anyway",
            EXIT_TRACE_GUARDRAIL,
        )
    _write_text(Path(args.out), [TRACE_HEADER] + [format_trace_line(e) for e in events])
    return 0


def _add_common_params(parser, *, bootstraps_default: int) -> None:
    parser.add_argument("--bootstraps", type=int, default=bootstraps_default,
                        help=f"bootstrap count b (default {bootstraps_default})")
    parser.add_argument("--min-count", type=int, default=5,
                        help="minimum rows to expand a node (default 5)")
    parser.add_argument("--max-depth", type=int, default=20,
                        help="maximum exploration depth (default 20)")
    parser.add_argument("--seed", type=int, default=0,
                        help="base seed (TREELAB_SEED overrides)")
    parser.add_argument("--no-header", action="store_true",
                        help="input CSVs carry no header row")
    parser.add_argument("--out", required=True, help="output file path")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="treelab",
                                     description="Bagged decision tree benchmark harness")
    sub = parser.add_subparsers(dest="command", required=True)

    bench = sub.add_parser("benchmark", help="k-fold cross-validation benchmark")
    bench.add_argument("--dataset", required=True, help="training CSV path")
    bench.add_argument("--algorithms", default="dt,lazy,batched",
                       help="comma list from {dt,lazy,batched}")
    bench.add_argument("--folds", required=True,
                       help="fold counts: '10', '2,5,10', or '10:400:10'")
    bench.add_argument("--jobs", type=int, default=1, help="parallel fold workers")
    bench.add_argument("--timing", choices=("cpu", "off"), default="cpu",
                       help="'off' writes 0.0 CPU seconds for reproducible reports")
    _add_common_params(bench, bootstraps_default=100)
    bench.set_defaults(func=cmd_benchmark)

    predict = sub.add_parser("predict", help="write class probabilities for a test CSV")
    predict.add_argument("--train", required=True)
    predict.add_argument("--test", required=True)
    predict.add_argument("--algorithm", choices=sorted(ALGORITHMS), default="dt")
    _add_common_params(predict, bootstraps_default=100)
    predict.set_defaults(func=cmd_predict)

    trace = sub.add_parser("trace", help="dump the node-visit sequence of one run")
    trace.add_argument("--train", required=True)
    trace.add_argument("--test", required=True)
    trace.add_argument("--algorithm", choices=sorted(ALGORITHMS), default="batched")
    trace.add_argument("--force", action="store_true",
                       help="write the trace even past the line guardrail")
    _add_common_params(trace, bootstraps_default=1)
    trace.set_defaults(func=cmd_trace)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except CliError as exc:
        print(f"treelab: {exc}", file=sys.stderr)
        return exc.exit_code
    except SchemaMismatchError as exc:
        print(f"treelab: {exc}", file=sys.stderr)
        return EXIT_SCHEMA_MISMATCH
    except DatasetError as exc:
        print(f"treelab: {exc}", file=sys.stderr)
        return EXIT_DATASET_ERROR
    except ValueError as exc:
        print(f"treelab: {exc}", file=sys.stderr)
        return EXIT_BAD_PARAMS
    except OSError as exc:
        print(f"treelab: {exc}", file=sys.stderr)
        return EXIT_OUTPUT_ERROR


if __name__ == "__main__":
    sys.exit(main())

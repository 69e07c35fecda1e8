"""Command-line front end.

Subcommands: ``cluster`` (fit one dataset), ``synth`` (k-recovery grid over
synthetic data), ``eval`` (score a clustering against labels), ``sweep-bic``
(the sweep-k baseline with the same I/O shape as cluster), and ``bench``
(runtime scaling over subsample sizes). Results are written as JSON and CSV;
every run echoes its effective configuration so it can be reproduced
bit-exactly. All randomness flows from --seed (default 1234), and reruns
with the same seed produce identical payloads apart from the timing fields
(``runtime_s``, ``wall_time_s``, the bench/cells ``seconds``/``runtime_s``
columns).
"""

import argparse
import csv
import dataclasses
import json
import math
import sys
import time
from pathlib import Path

import numpy as np

from . import baselines, kstar, metrics, synth
from .dataset import CsvFormatError, Dataset, LabelledDataset, load_csv
from .kstar import ConvergenceError, FitConfig

DEFAULT_SEED = 1234
SCHEMA_VERSION = 1


class UsageError(ValueError):
    """Invalid argument combination or value."""


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        summary = args.handler(args)
    except UsageError as exc:
        _emit_error("usage", exc)
        return 2
    except (CsvFormatError, FileNotFoundError, IsADirectoryError, PermissionError) as exc:
        _emit_error("data", exc)
        return 1
    except (ValueError, ConvergenceError, synth.ExperimentCellError) as exc:
        _emit_error("run", exc)
        return 1
    print(json.dumps(summary))
    return 0


def _emit_error(kind, exc):
    print(json.dumps({"error": {"type": kind, "message": str(exc)}}), file=sys.stderr)


def _build_parser():
    parser = argparse.ArgumentParser(
        prog="kstarmeans",
        description="Parameter-free clustering and its benchmark harness.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("cluster", help="fit a CSV dataset, discovering k")
    _common_io(p)
    p.add_argument("--strict", action="store_true",
                   help="run to a full fixpoint instead of the patience stop")
    p.add_argument("--patience", type=int, default=5)
    p.add_argument("--min-improvement", type=float, default=2.0)
    p.set_defaults(handler=cmd_cluster)

    p = sub.add_parser("synth", help="run the synthetic k-recovery grid")
    p.add_argument("--k-max", type=int, required=True, help="grid covers k = 1..k-max")
    p.add_argument("--seps", type=_floats_arg, default=[2.0, 3.0, 4.0, 5.0],
                   help="comma-separated separation values")
    p.add_argument("--reps", type=int, default=10)
    p.add_argument("--points", type=int, default=1000, help="points per instance")
    p.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p.add_argument("--algorithm", choices=["kstar", "sweep-bic"], default="kstar")
    p.add_argument("--output", required=True, help="output directory")
    p.set_defaults(handler=cmd_synth)

    p = sub.add_parser("eval", help="cluster a labelled CSV and score against the labels")
    _common_io(p)
    p.add_argument("--algorithm", choices=["kstar", "sweep-bic"], default="kstar")
    p.set_defaults(handler=cmd_eval)

    p = sub.add_parser("sweep-bic", help="sweep k with the BIC baseline")
    _common_io(p)
    p.add_argument("--grid", type=_ints_arg, default=None,
                   help="comma-separated candidate k values (default: 10%% increments)")
    p.set_defaults(handler=cmd_sweep)

    p = sub.add_parser("bench", help="time algorithms on random subsets of growing size")
    _common_io(p)
    p.add_argument("--sizes", type=_ints_arg, required=True)
    p.add_argument("--reps", type=int, default=3)
    p.add_argument("--algorithms", type=_algos_arg, default=None,
                   help="comma-separated subset of kstar,lloyd,sweep-bic")
    p.set_defaults(handler=cmd_bench)
    return parser


def _common_io(p):
    p.add_argument("--input", required=True, help="CSV file to read")
    p.add_argument("--output", required=True, help="where to write the result")
    p.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p.add_argument("--label-col", default=None,
                   help="label column (zero-based index, or name with --header)")
    p.add_argument("--header", action="store_true", help="first CSV line is a header")


def _floats_arg(text):
    return [float(v) for v in text.split(",") if v.strip()]


def _ints_arg(text):
    return [int(v) for v in text.split(",") if v.strip()]


def _algos_arg(text):
    algos = [v.strip() for v in text.split(",") if v.strip()]
    bad = set(algos) - {"kstar", "lloyd", "sweep-bic"}
    if bad:
        raise argparse.ArgumentTypeError(f"unknown algorithms: {sorted(bad)}")
    return algos


def _load(args):
    loaded = load_csv(args.input, label_column=args.label_col, has_header=args.header)
    if isinstance(loaded, LabelledDataset):
        return loaded.data, loaded.labels
    return loaded, None


def _write_json(path, record):
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w") as fh:
        json.dump(_json_safe(record), fh, indent=2)
        fh.write("\n")


def _json_safe(obj):
    if isinstance(obj, dict):
        return {str(k): _json_safe(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_json_safe(v) for v in obj]
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating, float)):
        value = float(obj)
        return value if math.isfinite(value) else None
    if isinstance(obj, np.ndarray):
        return _json_safe(obj.tolist())
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    return obj


def _write_assignments_csv(path, assignments):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["row", "cluster"])
        for i, c in enumerate(assignments):
            writer.writerow([i, int(c)])


def _assignments_path(output):
    out = Path(output)
    return out.with_name(out.stem + ".assignments.csv")


def cmd_cluster(args):
    started = time.perf_counter()
    data, _ = _load(args)
    config = FitConfig(seed=args.seed, patience=args.patience,
                       min_improvement=args.min_improvement,
                       strict_convergence=args.strict)
    result = kstar.fit(data, config)
    record = {
        "schema_version": SCHEMA_VERSION,
        "command": "cluster",
        "config": {
            "input": args.input,
            "seed": args.seed,
            "mode": "strict" if args.strict else "patience",
            "patience": args.patience,
            "min_improvement": args.min_improvement,
            "max_cycles": config.max_cycles,
            "label_col": args.label_col,
            "header": args.header,
        },
        "result": {
            "k": result.k,
            "centroids": result.model.centroids,
            "assignments": result.model.assignments,
            "cost": dataclasses.asdict(result.cost),
            "cost_trace": result.cost_trace,
            "n_cycles": result.n_cycles,
            "split_count": result.split_count,
            "merge_count": result.merge_count,
            "runtime_s": result.runtime,
        },
        "wall_time_s": time.perf_counter() - started,
    }
    _write_json(args.output, record)
    _write_assignments_csv(_assignments_path(args.output), result.model.assignments)
    return {"command": "cluster", "k": result.k, "output": args.output,
            "wall_time_s": record["wall_time_s"]}


def _algorithm_handle(name):
    if name == "kstar":
        return lambda data, seed: kstar.fit(data, FitConfig(seed=int(seed))).k
    return lambda data, seed: baselines.sweep_k_bic(
        data, np.random.default_rng(int(seed))).chosen_k


def cmd_synth(args):
    started = time.perf_counter()
    if args.reps < 1:
        raise UsageError("--reps must be >= 1")
    if args.k_max < 1:
        raise UsageError("--k-max must be >= 1")
    if not args.seps:
        raise UsageError("--seps must list at least one separation")
    report = synth.k_recovery_experiment(
        range(1, args.k_max + 1), args.seps, args.reps,
        _algorithm_handle(args.algorithm), base_seed=args.seed,
        total_points=args.points,
    )
    out_dir = Path(args.output)
    out_dir.mkdir(parents=True, exist_ok=True)
    cells_path = out_dir / "cells.csv"
    with open(cells_path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["true_k", "d_sep", "rep", "predicted_k", "exact", "runtime_s"])
        for cell in report.per_cell:
            writer.writerow([cell.true_k, cell.d_sep, cell.rep, cell.predicted_k,
                             int(cell.exact), f"{cell.runtime:.6f}"])
    record = {
        "schema_version": SCHEMA_VERSION,
        "command": "synth",
        "config": {
            "k_max": args.k_max,
            "seps": args.seps,
            "reps": args.reps,
            "points": args.points,
            "seed": args.seed,
            "algorithm": args.algorithm,
        },
        "result": {
            "per_sep": {str(s): report.per_sep[s] for s in args.seps},
            "overall": {"accuracy": report.accuracy, "mse": report.mse},
        },
        "wall_time_s": time.perf_counter() - started,
    }
    _write_json(out_dir / "summary.json", record)
    return {"command": "synth", "accuracy": report.accuracy, "mse": report.mse,
            "output": str(out_dir), "wall_time_s": record["wall_time_s"]}


def cmd_eval(args):
    started = time.perf_counter()
    data, labels = _load(args)
    if labels is None:
        raise UsageError("eval requires --label-col")
    if args.algorithm == "kstar":
        result = kstar.fit(data, FitConfig(seed=args.seed))
        pred = result.model.assignments
        predicted_k = result.k
        runtime = result.runtime
    else:
        report = baselines.sweep_k_bic(data, np.random.default_rng(args.seed))
        pred = report.chosen.assignments
        predicted_k = report.chosen_k
        runtime = report.runtime
    table = metrics.contingency(labels, pred)
    record = {
        "schema_version": SCHEMA_VERSION,
        "command": "eval",
        "config": {
            "input": args.input,
            "seed": args.seed,
            "algorithm": args.algorithm,
            "label_col": args.label_col,
            "header": args.header,
        },
        "result": {
            "acc": metrics.accuracy(table),
            "ari": metrics.ari(table),
            "nmi": metrics.nmi(table),
            "predicted_k": predicted_k,
            "true_k": int(labels.max()) + 1,
            "runtime_s": runtime,
        },
        "wall_time_s": time.perf_counter() - started,
    }
    _write_json(args.output, record)
    summary = dict(record["result"])
    summary.pop("runtime_s")
    return {"command": "eval", **summary, "output": args.output,
            "wall_time_s": record["wall_time_s"]}


def cmd_sweep(args):
    started = time.perf_counter()
    data, _ = _load(args)
    report = baselines.sweep_k_bic(data, np.random.default_rng(args.seed),
                                   grid=args.grid)
    record = {
        "schema_version": SCHEMA_VERSION,
        "command": "sweep-bic",
        "config": {
            "input": args.input,
            "seed": args.seed,
            "grid": args.grid,
            "label_col": args.label_col,
            "header": args.header,
        },
        "result": {
            "candidate_ks": report.candidate_ks,
            "bic_scores": report.bic_scores,
            "chosen_k": report.chosen_k,
            "centroids": report.chosen.centroids,
            "assignments": report.chosen.assignments,
            "inertia": report.chosen.inertia,
            "n_iters": report.chosen.n_iters,
            "runtime_s": report.runtime,
        },
        "wall_time_s": time.perf_counter() - started,
    }
    _write_json(args.output, record)
    _write_assignments_csv(_assignments_path(args.output), report.chosen.assignments)
    return {"command": "sweep-bic", "chosen_k": report.chosen_k,
            "output": args.output, "wall_time_s": record["wall_time_s"]}


def cmd_bench(args):
    started = time.perf_counter()
    data, labels = _load(args)
    if args.reps < 1:
        raise UsageError("--reps must be >= 1")
    sizes = args.sizes
    if not sizes:
        raise UsageError("--sizes must list at least one size")
    too_big = [s for s in sizes if s > data.n]
    if too_big:
        raise UsageError(f"sizes {too_big} exceed the dataset size {data.n}")
    if any(s < 1 for s in sizes):
        raise UsageError("sizes must be >= 1")
    algorithms = args.algorithms
    if algorithms is None:
        algorithms = ["kstar", "lloyd"] if labels is not None else ["kstar"]
    if "lloyd" in algorithms and labels is None:
        raise UsageError("lloyd needs the true k: provide --label-col")

    rows = []
    for size in sizes:
        for rep in range(args.reps):
            ss = np.random.SeedSequence([args.seed, size, rep])
            sub_state, algo_state = ss.generate_state(2, dtype=np.uint64)
            idx = np.random.default_rng(int(sub_state)).choice(data.n, size=size,
                                                               replace=False)
            subset = Dataset(data.points[idx])
            sub_labels = labels[idx] if labels is not None else None
            for algo in algorithms:
                elapsed = _time_algorithm(algo, subset, sub_labels, int(algo_state))
                rows.append((algo, size, rep, elapsed))

    Path(args.output).parent.mkdir(parents=True, exist_ok=True)
    with open(args.output, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["algorithm", "size", "rep", "seconds"])
        for algo, size, rep, seconds in rows:
            writer.writerow([algo, size, rep, f"{seconds:.6f}"])

    means = {}
    for algo in algorithms:
        means[algo] = {
            str(size): float(np.mean([r[3] for r in rows if r[0] == algo and r[1] == size]))
            for size in sizes
        }
    return {"command": "bench", "mean_seconds": means, "output": args.output,
            "wall_time_s": time.perf_counter() - started}


def _time_algorithm(algo, subset, sub_labels, seed):
    t0 = time.perf_counter()
    if algo == "kstar":
        kstar.fit(subset, FitConfig(seed=seed))
    elif algo == "lloyd":
        true_k = int(np.unique(sub_labels).size)
        baselines.lloyd(subset, true_k, np.random.default_rng(seed))
    else:
        baselines.sweep_k_bic(subset, np.random.default_rng(seed))
    return time.perf_counter() - t0


if __name__ == "__main__":
    sys.exit(main())

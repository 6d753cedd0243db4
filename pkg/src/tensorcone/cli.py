"""Command line interface: ``tensorcone <command> ...``.

Exit codes: 0 success, 2 usage error, 3 data error, 4 numerical failure.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from pathlib import Path
from typing import Any, Sequence

import numpy as np

from . import experiments, io
from .config import ConfigError, generate, load_model_config, load_sweep_config, solver_config_from
from .exceptions import FormatError, NumericalFailure
from .solver import BRUTE_FORCE_MAX_N, brute_force, certify, solve
from .validation import check_assignment

EXIT_USAGE, EXIT_DATA, EXIT_NUMERICAL = 2, 3, 4


class DataError(Exception):
    pass


def _dump(payload: dict[str, Any], path: str | None) -> None:
    text = json.dumps(io.dump_json_ready(payload), sort_keys=True, indent=2) + "\n"
    if path:
        Path(path).write_text(text)
    else:
        sys.stdout.write(text)


def _write_csv(path: str | Path, columns: Sequence[str], rows: list[dict[str, Any]]) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=list(columns), lineterminator="\n")
        writer.writeheader()
        for row in rows:
            writer.writerow({k: row[k] for k in columns})


def _solver_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--zeta", type=float, default=0.05, help="gradient step (default 0.05)")
    p.add_argument("--outer", type=int, default=100, help="outer iterations (default 100)")
    p.add_argument("--inner", type=int, default=40, help="inner iterations (default 40)")
    p.add_argument("--descent", type=int, default=20, help="descent iterations (default 20)")
    p.add_argument("--gamma", type=float, default=0.05, help="descent step (default 0.05)")
    p.add_argument("--starts", type=int, default=8, help="random starts per descent (default 8)")


def _solver_config(args, seed: int):
    values = {k: getattr(args, k) for k in ("zeta", "outer", "inner", "descent", "gamma", "starts")}
    try:
        return solver_config_from(values, seed)
    except ValueError as exc:
        raise DataError(str(exc)) from exc


def _read_labels(path: str, n: int) -> np.ndarray:
    y = io.read_labels(path)
    try:
        return check_assignment(y, n)
    except ValueError as exc:
        raise DataError(f"{path}: {exc}") from exc


def cmd_generate(args) -> int:
    cfg = load_model_config(args.config)
    W, y_star = generate(cfg)
    io.write_tensor(W, args.out)
    if args.truth_out:
        io.write_labels(y_star, args.truth_out)
    return 0


def cmd_solve(args) -> int:
    W = io.read_tensor(args.tensor)
    if W.m % 2:
        raise DataError(f"{args.tensor}: odd order m={W.m} cannot be solved")
    y_star = _read_labels(args.truth, W.n) if args.truth else None
    cfg = _solver_config(args, args.seed)
    result = solve(W, cfg, y_star)
    payload = {
        "n": W.n,
        "m": W.m,
        "seed": args.seed,
        "config": {
            "zeta": cfg.zeta,
            "outer": cfg.outer_iters,
            "inner": cfg.inner_iters,
            "descent": cfg.descent_iters,
            "gamma": cfg.ascent.step_gamma,
            "starts": cfg.ascent.num_starts,
        },
        "y_hat": result.y_hat,
        "objective": result.objective,
        "h": result.h,
        "psd_corrections": result.psd_corrections,
        "trace_objective": [row["objective"] for row in result.trace],
    }
    recovered = None
    if y_star is not None:
        recovered = bool(np.array_equal(result.y_hat, y_star) or np.array_equal(result.y_hat, -y_star))
        payload["recovered"] = recovered
    _dump(payload, args.out)
    if args.csv:
        row = {
            "setting": "solve",
            "trial": 0,
            "seed": args.seed,
            "h": "" if result.h is None else result.h,
            "objective": result.objective,
            "recovered": "" if recovered is None else recovered,
            "psd_corrections": result.psd_corrections,
            "wall_ms": round(result.wall_ms, 3),
        }
        _write_csv(args.csv, experiments.EXPERIMENT_COLUMNS, [row])
    return 0


def cmd_oracle(args) -> int:
    W = io.read_tensor(args.tensor)
    if W.n > BRUTE_FORCE_MAX_N:
        raise DataError(f"exhaustive search is limited to n <= {BRUTE_FORCE_MAX_N}; file has n={W.n}")
    y_opt, value, tie = brute_force(W)
    _dump({"y_opt": y_opt, "value": value, "tie": tie}, args.out)
    return 0


def cmd_certify(args) -> int:
    W = io.read_tensor(args.tensor)
    y = _read_labels(args.labels, W.n)
    cert = certify(W, y, solver_config_from({}, args.seed))
    _dump(cert.as_dict(), args.out)
    return 0


def cmd_experiment(args) -> int:
    solver = _solver_config(args, args.seed)
    rows = experiments.run_appendix_d(args.trials, args.seed, solver, jobs=args.jobs)
    _write_csv(args.csv, experiments.EXPERIMENT_COLUMNS, rows)
    for setting, stats in experiments.summarize(rows).items():
        ref = experiments.APPENDIX_D_REFERENCE[setting]
        print(
            f"{setting}: mean h = {stats['mean_h']:.4f} (reference {ref}), "
            f"recovered {stats['recovery_rate']:.0%} of {stats['trials']} trials"
        )
    return 0


def cmd_sweep(args) -> int:
    cfg = load_sweep_config(args.config)
    rows, summary = experiments.run_sweep(cfg, jobs=args.jobs)
    _write_csv(args.out, experiments.SWEEP_COLUMNS, rows)
    summary_path = args.summary_out or str(Path(args.out).with_suffix("")) + "_summary.csv"
    _write_csv(summary_path, experiments.SWEEP_SUMMARY_COLUMNS, summary)
    for agg in summary:
        print(f"point {agg['point']} n={agg['n']} {agg['params']}: recovery {agg['recovery_rate']:.2f}, mean h {agg['mean_h']:.4f}")
    return 0


def cmd_tensor_convert(args) -> int:
    text = Path(args.input).read_text()
    if args.to == "dense":
        out = io.format_dense(io.parse_tensor(text))
    else:
        out = io.format_tensor(io.parse_dense(text))
    Path(args.output).write_text(out)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="tensorcone", description="Exact partitioning of homogeneous polynomial models.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="sample a model tensor and its planted labels")
    p.add_argument("config", help="model config file")
    p.add_argument("-o", "--out", required=True, help="tensor output path (SYMTENSOR v1)")
    p.add_argument("--truth-out", help="planted labels output path")
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("solve", help="run the projected gradient solver and extract labels")
    p.add_argument("tensor")
    _solver_flags(p)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--truth", help="planted labels, enables h and recovery")
    p.add_argument("-o", "--out", help="result JSON path (default stdout)")
    p.add_argument("--csv", help="also write a one-row CSV")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("oracle", help="exhaustive maximizer for small n")
    p.add_argument("tensor")
    p.add_argument("-o", "--out")
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("certify", help="dual certificate check of a labeling")
    p.add_argument("tensor")
    p.add_argument("labels")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("-o", "--out")
    p.set_defaults(func=cmd_certify)

    p = sub.add_parser("experiment-appendix-d", help="strong and weak planted-counts experiment (n=20, m=4)")
    p.add_argument("--trials", type=int, default=10)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--csv", default="appendix_d.csv")
    p.add_argument("--jobs", type=int, default=1, help="worker processes")
    _solver_flags(p)
    p.set_defaults(func=cmd_experiment)

    p = sub.add_parser("sweep", help="grid of models with recovery statistics")
    p.add_argument("config")
    p.add_argument("-o", "--out", default="sweep.csv")
    p.add_argument("--summary-out")
    p.add_argument("--jobs", type=int, default=1)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("tensor-convert", help="convert between SYMTENSOR and dense text (n <= 5)")
    p.add_argument("input")
    p.add_argument("output")
    p.add_argument("--to", choices=("dense", "canonical"), required=True)
    p.set_defaults(func=cmd_tensor_convert)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except NumericalFailure as exc:
        print(f"tensorcone: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except (FormatError, ConfigError, DataError, OSError, ValueError) as exc:
        print(f"tensorcone: error: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())

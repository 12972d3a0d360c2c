"""Command-line interface.

Subcommands: ``optimize`` (benchmark functions, box or correlation-manifold
variants), ``benchmark`` (summary table over several functions, with an
optional random-search baseline), ``estimate`` (robust correlation estimation
from a CSV), ``simulate`` (contamination scenario from a config file), and
``outlier-report`` (per-column IQR fence counts).

Exit codes: 0 success, 1 runtime failure (including degenerate data), 2 bad
arguments, malformed input files, or invalid configuration.
"""

from __future__ import annotations

import argparse
import sys
import time
from dataclasses import asdict, replace

import numpy as np

from . import artifacts
from .artifacts import (
    ensure_outdir,
    load_optimizer_overrides,
    load_scenario_config,
    make_loss_spec,
    optimizer_config_from,
    scenario_record,
    write_angles_csv,
    write_heatmap_csv,
    write_json,
    write_matrix_csv,
    write_trace_csv,
)
from .benchmarks import BENCHMARKS, BenchmarkSpec, benchmark_box_domain, corr_objective
from .errors import ConfigError, GlasdError, MalformedDataError
from .estimate import estimate_correlation
from .losses import outlier_report, read_data_csv, standardize_columns
from .manifold import angles_to_corr, default_angle_box, minimize_over_corr
from .optimizer import (
    OptimizerConfig,
    derive_seeds,
    multi_start_minimize,
    random_search_minimize,
)
from .simulate import run_scenario


def _fresh_seed() -> int:
    return int(np.random.SeedSequence().generate_state(1, dtype=np.uint64)[0])


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="glasd")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, with_loss=False):
        p.add_argument("--seed", type=int, default=None, help="master seed")
        p.add_argument("--starts", type=int, default=10, help="independent restarts")
        p.add_argument("--out", default="glasd_out", help="output directory")
        p.add_argument("--force", action="store_true", help="overwrite an existing run record")
        p.add_argument("--config", default=None, help="INI file with an [optimizer] section")
        p.add_argument("--max-iters", type=int, default=None)
        p.add_argument("--stagnation-window", type=int, default=None)
        p.add_argument("--epsilon", type=float, default=None)
        p.add_argument("-v", "--verbose", action="count", default=0)
        if with_loss:
            p.add_argument("--loss", default="gaussian",
                           choices=["gaussian", "huber", "truncated", "tukey"])
            p.add_argument("--threshold", default="iqr",
                           help="'iqr' (per-evaluation Q3+3*IQR cutoff), "
                                "'iqr-pilot' (frozen under a pilot), or a "
                                "positive number on the d^2 scale")

    p_opt = sub.add_parser("optimize", help="minimize one benchmark function")
    p_opt.add_argument("--fn", required=True, choices=sorted(BENCHMARKS))
    p_opt.add_argument("--variant", default="corr", choices=["box", "corr"])
    p_opt.add_argument("--M", type=int, default=5, help="matrix dimension (corr variant)")
    p_opt.add_argument("--dim", type=int, default=10, help="vector dimension (box variant)")
    common(p_opt)

    p_bench = sub.add_parser("benchmark", help="summary table over several functions")
    p_bench.add_argument("--fn", default="all",
                         help="comma-separated benchmark names, or 'all'")
    p_bench.add_argument("--variant", default="corr", choices=["box", "corr"])
    p_bench.add_argument("--M", type=int, default=5)
    p_bench.add_argument("--dim", type=int, default=10)
    p_bench.add_argument("--baseline", default=None, choices=["random"],
                         help="also run a random-search baseline")
    common(p_bench)

    p_est = sub.add_parser("estimate", help="robust correlation estimation from CSV")
    p_est.add_argument("data", help="CSV file, rows = observations")
    common(p_est, with_loss=True)

    p_sim = sub.add_parser("simulate", help="run one contamination scenario")
    p_sim.add_argument("scenario", help="INI scenario config")
    p_sim.add_argument("--seed", type=int, default=None, help="override the master seed")
    p_sim.add_argument("--out", default="glasd_out")
    p_sim.add_argument("--force", action="store_true")
    p_sim.add_argument("-v", "--verbose", action="count", default=0)

    p_out = sub.add_parser("outlier-report", help="per-column IQR outlier counts")
    p_out.add_argument("data", help="CSV file")
    p_out.add_argument("--out", default="glasd_out")
    p_out.add_argument("--force", action="store_true")
    p_out.add_argument("-v", "--verbose", action="count", default=0)

    return parser


def _optimizer_config(args) -> OptimizerConfig:
    overrides = {}
    if getattr(args, "config", None):
        overrides.update(load_optimizer_overrides(args.config))
    if getattr(args, "max_iters", None) is not None:
        overrides["max_iters"] = args.max_iters
    if getattr(args, "stagnation_window", None) is not None:
        overrides["stagnation_window"] = args.stagnation_window
    if getattr(args, "epsilon", None) is not None:
        overrides["epsilon"] = args.epsilon
    return optimizer_config_from(overrides)


def _se(values: np.ndarray) -> float:
    if values.size < 2:
        return 0.0
    return float(values.std(ddof=1) / np.sqrt(values.size))


def _run_benchmark(name, variant, size, config, n_starts, master_seed):
    """One multi-start benchmark run; returns (records, best_matrix_or_None, secs)."""
    t0 = time.perf_counter()
    if variant == "corr":
        spec = BenchmarkSpec(name, "corr-manifold", dim=size)
        best_C, records = minimize_over_corr(
            corr_objective(spec), size, config=config,
            n_starts=n_starts, master_seed=master_seed,
        )
    else:
        spec = BenchmarkSpec(name, "box", dim=size)
        func = BENCHMARKS[name][0]
        records = multi_start_minimize(
            func, benchmark_box_domain(name, size), config=config,
            n_starts=n_starts, master_seed=master_seed,
        )
        best_C = None
    return records, best_C, time.perf_counter() - t0


def _problem_dim(variant: str, size: int) -> int:
    return size * (size - 1) // 2 if variant == "corr" else size


def cmd_optimize(args) -> int:
    config = _optimizer_config(args)
    master_seed = args.seed if args.seed is not None else _fresh_seed()
    size = args.M if args.variant == "corr" else args.dim
    out = ensure_outdir(args.out, "result.json", args.force)

    records, best_C, elapsed = _run_benchmark(
        args.fn, args.variant, size, config, args.starts, master_seed
    )
    f_bests = np.array([r.f_best for r in records])
    record = {
        "command": "optimize",
        "benchmark": args.fn,
        "variant": args.variant,
        "size": size,
        "n_starts": args.starts,
        "master_seed": master_seed,
        "start_seeds": [r.seed for r in records],
        "min_value": float(f_bests.min()),
        "se_of_values": _se(f_bests),
        "mean_runtime_s": elapsed / args.starts,
        "per_start": [
            {"seed": r.seed, "f_best": r.f_best, "iterations": r.iterations,
             "evaluations": r.evaluations, "termination": r.termination}
            for r in records
        ],
        "optimizer_config": asdict(config),
        "optimizer_config_resolved": asdict(
            config.resolved(_problem_dim(args.variant, size))),
    }
    write_json(f"{out}/result.json", record)
    for k, rec in enumerate(records):
        write_trace_csv(f"{out}/trace_{k:02d}.csv", rec.trace)
    if best_C is not None:
        names = [f"x{j + 1}" for j in range(size)]
        write_matrix_csv(f"{out}/best_matrix.csv", best_C, names)
        best = min(records, key=lambda r: r.f_best)
        write_angles_csv(f"{out}/best_angles.csv", best.x_best)
    print(f"{args.fn} ({args.variant}, size {size}): "
          f"min {f_bests.min():.4g}, s.e. {_se(f_bests):.4g} over {args.starts} starts")
    return 0


def cmd_benchmark(args) -> int:
    config = _optimizer_config(args)
    master_seed = args.seed if args.seed is not None else _fresh_seed()
    size = args.M if args.variant == "corr" else args.dim
    names = sorted(BENCHMARKS) if args.fn == "all" else [t.strip() for t in args.fn.split(",")]
    for name in names:
        if name not in BENCHMARKS:
            raise ConfigError(f"unknown benchmark {name!r}")
    out = ensure_outdir(args.out, "benchmark.json", args.force)

    rows = []
    detail = []
    fn_seeds = derive_seeds(master_seed, len(names))
    for k, name in enumerate(names):
        fn_seed = fn_seeds[k]
        records, _, elapsed = _run_benchmark(
            name, args.variant, size, config, args.starts, fn_seed
        )
        f_bests = np.array([r.f_best for r in records])
        rows.append((name, "glasd", float(f_bests.min()), _se(f_bests),
                     elapsed / args.starts))
        detail.append({"benchmark": name, "solver": "glasd", "seed": fn_seed,
                       "values": [r.f_best for r in records]})
        if args.baseline == "random":
            budget = (config.resolved(size * (size - 1) // 2 if args.variant == "corr"
                                      else size).max_iters)
            base_vals = []
            t0 = time.perf_counter()
            base_seeds = derive_seeds(fn_seed + 1, args.starts)
            for s in base_seeds:
                if args.variant == "corr":
                    spec = BenchmarkSpec(name, "corr-manifold", dim=size)
                    obj = corr_objective(spec)
                    rec = random_search_minimize(
                        lambda a: obj(angles_to_corr(a)),
                        default_angle_box(size), budget, seed=s)
                else:
                    rec = random_search_minimize(
                        BENCHMARKS[name][0], benchmark_box_domain(name, size),
                        budget, seed=s)
                base_vals.append(rec.f_best)
            base_vals = np.array(base_vals)
            rows.append((name, "random-search", float(base_vals.min()),
                         _se(base_vals), (time.perf_counter() - t0) / args.starts))
            detail.append({"benchmark": name, "solver": "random-search",
                           "seed": fn_seed + 1, "values": base_vals.tolist()})

    with open(f"{out}/summary.csv", "w", encoding="utf-8") as fh:
        fh.write("benchmark,solver,min_value,se_of_values,mean_runtime_s\n")
        for name, solver, mn, se, rt in rows:
            fh.write(f"{name},{solver},{artifacts.fmt(mn)},{artifacts.fmt(se)},{artifacts.fmt(rt)}\n")
    write_json(f"{out}/benchmark.json", {
        "command": "benchmark", "variant": args.variant, "size": size,
        "n_starts": args.starts, "master_seed": master_seed,
        "optimizer_config": asdict(config), "runs": detail,
    })
    for name, solver, mn, se, _ in rows:
        print(f"{name:12s} {solver:14s} min {mn:.4g}  s.e. {se:.4g}")
    return 0


def cmd_estimate(args) -> int:
    config = _optimizer_config(args)
    master_seed = args.seed if args.seed is not None else _fresh_seed()
    data = read_data_csv(args.data)
    out = ensure_outdir(args.out, "run.json", args.force)

    X_std = standardize_columns(data)
    spec = make_loss_spec(args.loss, args.threshold)
    t0 = time.perf_counter()
    fit = estimate_correlation(X_std, spec, config=config,
                               n_starts=args.starts, master_seed=master_seed)
    elapsed = time.perf_counter() - t0

    names = data.names()
    write_matrix_csv(f"{out}/corr.csv", fit.corr, names)
    write_heatmap_csv(f"{out}/heatmap.csv", fit.corr, names)
    write_json(f"{out}/run.json", {
        "command": "estimate",
        "input": str(args.data),
        "n": data.n, "p": data.p,
        "loss": args.loss,
        "threshold_policy": args.threshold,
        "threshold": fit.threshold,
        "n_starts": args.starts,
        "master_seed": master_seed,
        "start_seeds": fit.start_seeds,
        "f_best": fit.f_best,
        "runtime_s": elapsed,
        "optimizer_config": asdict(config),
        "optimizer_config_resolved": asdict(
            config.resolved(data.p * (data.p - 1) // 2)),
    })
    print(f"estimated {data.p} x {data.p} correlation ({args.loss}); "
          f"objective {fit.f_best:.4g}")
    return 0


def cmd_simulate(args) -> int:
    spec = load_scenario_config(args.scenario)
    if args.seed is not None:
        spec = replace(spec, master_seed=args.seed)
    out = ensure_outdir(args.out, "scenario.json", args.force)

    result = run_scenario(spec)
    agg = result.aggregate()
    with open(f"{out}/rmse_table.csv", "w", encoding="utf-8") as fh:
        fh.write("loss,mean_rmse,se,mean_runtime\n")
        for ls in spec.losses:
            a = agg[ls.kind]
            fh.write(f"{ls.kind},{artifacts.fmt(a['mean_rmse'])},"
                     f"{artifacts.fmt(a['se_rmse'])},{artifacts.fmt(a['mean_runtime_s'])}\n")
    write_json(f"{out}/scenario.json", {
        "command": "simulate",
        "config_file": str(args.scenario),
        "spec": scenario_record(spec),
        "data_seeds": result.data_seeds,
        "cells": [
            {"replicate": c.replicate, "loss": c.loss, "rmse": c.rmse,
             "f_best": c.f_best, "threshold": c.threshold,
             "runtime_s": c.runtime_s, "opt_seed": c.opt_seed}
            for c in result.cells
        ],
        "aggregates": agg,
    })
    for ls in spec.losses:
        a = agg[ls.kind]
        print(f"{ls.kind:10s} rmse {a['mean_rmse']:.4g} (se {a['se_rmse']:.4g})")
    return 0


def cmd_outlier_report(args) -> int:
    data = read_data_csv(args.data)
    out = ensure_outdir(args.out, "run.json", args.force)
    counts = outlier_report(data)
    with open(f"{out}/outliers.csv", "w", encoding="utf-8") as fh:
        fh.write("column,count\n")
        for name, cnt in counts:
            fh.write(f"{name},{cnt}\n")
    write_json(f"{out}/run.json", {
        "command": "outlier-report",
        "input": str(args.data),
        "n": data.n, "p": data.p,
        "counts": {name: cnt for name, cnt in counts},
    })
    for name, cnt in counts:
        print(f"{name}: {cnt}")
    return 0


_DISPATCH = {
    "optimize": cmd_optimize,
    "benchmark": cmd_benchmark,
    "estimate": cmd_estimate,
    "simulate": cmd_simulate,
    "outlier-report": cmd_outlier_report,
}


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else 0
    try:
        return _DISPATCH[args.command](args)
    except (ConfigError, MalformedDataError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except GlasdError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except Exception as exc:  # runtime failure of any other kind
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())

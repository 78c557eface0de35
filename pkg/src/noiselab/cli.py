"""Command-line entry point.

Subcommands: train, figure1, gibbs, statdim, intersect, walk, report.
Config values resolve as flags > config file (TOML) > built-in defaults.
Exit codes: 0 success, 1 config error, 2 runtime failure.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from pathlib import Path

import numpy as np

try:
    import tomllib  # py311+
except ModuleNotFoundError:  # pragma: no cover - py310 path
    import tomli as tomllib

from . import gibbs, presets, walks
from .engines import NoiseSpec
from .model import generate_dataset
from .runs import RunJob, run_grid, summarize_runs
from .trainer import ScheduleSpec, three_stage_schedule


class ConfigError(ValueError):
    pass


def _parse_seeds(text: str) -> list[int]:
    """Comma list and/or inclusive ranges: '0..9' or '0,3,7..9'."""
    seeds = []
    for part in text.split(","):
        part = part.strip()
        if ".." in part:
            lo, hi = part.split("..")
            seeds.extend(range(int(lo), int(hi) + 1))
        elif part:
            seeds.append(int(part))
    if len(set(seeds)) != len(seeds):
        raise ConfigError(f"duplicate seeds in {text!r}")
    if not seeds:
        raise ConfigError("empty seed list")
    return seeds


def _load_config(path: str | None) -> dict:
    if path is None:
        return {}
    p = Path(path)
    if not p.exists():
        raise ConfigError(f"config file not found: {path}")
    with open(p, "rb") as fh:
        return tomllib.load(fh)


def _resolved(args: argparse.Namespace, cfg: dict, key: str, default):
    """flags > config file > default; argparse stores None when a flag is absent."""
    val = getattr(args, key, None)
    if val is not None:
        return val
    if key in cfg:
        return cfg[key]
    return default


def _engine_spec(kind: str, delta: float, sigma: float | None, lambda_temp: float | None) -> NoiseSpec:
    if kind == "gaussian":
        return NoiseSpec(kind=kind, sigma=sigma, lambda_temp=lambda_temp)
    return NoiseSpec(kind=kind, delta=delta)


def _cmd_train(args: argparse.Namespace) -> int:
    cfg = _load_config(args.config)
    d = int(_resolved(args, cfg, "d", presets.BENCHMARK_D))
    n = int(_resolved(args, cfg, "n", presets.BENCHMARK_N))
    r = int(_resolved(args, cfg, "r", presets.BENCHMARK_R))
    dataset_seed = int(_resolved(args, cfg, "dataset_seed", 0))
    init_scale = float(_resolved(args, cfg, "init_scale", 1.0))
    log_every = int(_resolved(args, cfg, "log_every", 1000))
    engine_kind = _resolved(args, cfg, "engine", "label_noise")
    delta = float(_resolved(args, cfg, "delta", 1.0))
    sigma = _resolved(args, cfg, "sigma", None)
    lambda_temp = _resolved(args, cfg, "lambda_temp", None)
    epsilon = float(_resolved(args, cfg, "epsilon", 0.1))
    seeds = _parse_seeds(str(_resolved(args, cfg, "seeds", "0")))
    out = Path(_resolved(args, cfg, "out", "runs"))

    stages_cfg = cfg.get("stages")
    if args.eta is not None and args.steps is not None:
        schedule = ScheduleSpec.constant(args.eta, args.steps)
    elif stages_cfg:
        schedule = ScheduleSpec(stages=tuple((float(e), int(s)) for e, s in stages_cfg))
    else:
        schedule = three_stage_schedule(delta=delta, epsilon=epsilon)

    spec = _engine_spec(engine_kind, delta,
                        None if sigma is None else float(sigma),
                        None if lambda_temp is None else float(lambda_temp))
    jobs = [
        RunJob(
            engine=spec, schedule=schedule,
            dataset_params={"d": d, "n": n, "r": r, "seed": dataset_seed + s},
            seed=s, init_scale=init_scale, log_every=log_every, out_dir=str(out),
        )
        for s in seeds
    ]
    run_grid(jobs, workers=args.workers)
    summary = summarize_runs(out, recovery_epsilon=epsilon)
    print(json.dumps({"out": str(out), "engines": list(summary["engines"])}))
    return 0


def _cmd_figure1(args: argparse.Namespace) -> int:
    preset = presets.comparison_preset()
    seeds = _parse_seeds(args.seeds)
    out = Path(args.out)
    wanted = None if args.engines in (None, "all") else set(args.engines.split(","))
    jobs = []
    for spec, schedule in preset.engine_plans():
        if wanted is not None and spec.kind not in wanted:
            continue
        for s in seeds:
            jobs.append(RunJob(
                engine=spec, schedule=schedule,
                dataset_params={"d": preset.d, "n": preset.n, "r": preset.r, "seed": s},
                seed=10_000 + s, init_scale=preset.init_scale,
                log_every=args.log_every, out_dir=str(out),
            ))
    run_grid(jobs, workers=args.workers)
    summary = summarize_runs(out)
    print(json.dumps({k: v["final_test_error"]["median"] for k, v in summary["engines"].items()}))
    return 0


def _cmd_gibbs(args: argparse.Namespace) -> int:
    ds = generate_dataset(d=args.d, n=args.n, r=0, seed=args.seed)
    grid = np.logspace(args.z_min_exp, args.z_max_exp, args.z_points)
    report = gibbs.partition_divergence_probe(ds, z_grid=grid)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    (out / "cone_probe.json").write_text(report.to_json())
    with open(out / "partial_integrals.csv", "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["Z", "I", "log_I"])
        for (z, i_val), log_i in zip(report.partial_integrals, report.log_partial_integrals):
            writer.writerow([repr(z), repr(i_val), repr(float(log_i))])
    print(json.dumps({
        "feasible": report.feasible,
        "fitted_slope": report.fitted_slope,
        "theoretical_slope": report.theoretical_slope,
        "diverging": report.diverging,
    }))
    return 0


def _cmd_statdim(args: argparse.Namespace) -> int:
    est = gibbs.statistical_dimension_mc(args.d, args.samples, seed=args.seed)
    print(json.dumps({"d": args.d, "estimate": est.estimate, "stderr": est.stderr,
                      "expected": args.d / 2.0}))
    return 0


def _cmd_intersect(args: argparse.Namespace) -> int:
    frac = gibbs.intersection_probability_mc(args.d, args.n, args.trials, seed=args.seed)
    print(json.dumps({"d": args.d, "n": args.n, "trials": args.trials, "fraction": frac}))
    return 0


def _cmd_walk(args: argparse.Namespace) -> int:
    cfg = walks.WalkConfig(kind=args.kind, eta=args.eta, steps=args.steps, seed=args.seed)
    stats = walks.walk_ensemble_stats(cfg, trials=args.trials, thresholds=(args.threshold,))
    rows = zip(stats.checkpoints, stats.mean_v, stats.mean_sqrt_v,
               stats.frac_below[args.threshold])
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    with open(out, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["step", "mean_v", "mean_sqrt_v", f"frac_below_{args.threshold:g}"])
        for step, mv, ms, fb in rows:
            writer.writerow([int(step), repr(float(mv)), repr(float(ms)), repr(float(fb))])
    print(json.dumps({"out": str(out), "checkpoints": len(stats.checkpoints)}))
    return 0


def _cmd_report(args: argparse.Namespace) -> int:
    summary = summarize_runs(args.run_dir, recovery_epsilon=args.epsilon)
    print(json.dumps(summary, indent=1))
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="noiselab", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)

    t = sub.add_parser("train", help="run one engine over a seed list")
    t.add_argument("--config", help="TOML config file")
    t.add_argument("--engine", choices=["gd", "plain_sgd", "label_noise", "minibatch_sim", "gaussian"])
    t.add_argument("--d", type=int)
    t.add_argument("--n", type=int)
    t.add_argument("--r", type=int)
    t.add_argument("--dataset-seed", dest="dataset_seed", type=int)
    t.add_argument("--delta", type=float)
    t.add_argument("--sigma", type=float)
    t.add_argument("--lambda-temp", dest="lambda_temp", type=float)
    t.add_argument("--epsilon", type=float)
    t.add_argument("--eta", type=float, help="constant learning rate (with --steps)")
    t.add_argument("--steps", type=int)
    t.add_argument("--init-scale", dest="init_scale", type=float)
    t.add_argument("--log-every", dest="log_every", type=int)
    t.add_argument("--seeds", type=str)
    t.add_argument("--out", type=str)
    t.add_argument("--workers", type=int)
    t.set_defaults(func=_cmd_train)

    f = sub.add_parser("figure1", help="run the 100-dim engine-comparison benchmark grid")
    f.add_argument("--engines", default="all",
                   help="'all' or comma list of kinds (gaussian runs its sigma sweep)")
    f.add_argument("--seeds", default="0..4")
    f.add_argument("--out", required=True)
    f.add_argument("--log-every", dest="log_every", type=int, default=1000)
    f.add_argument("--workers", type=int)
    f.set_defaults(func=_cmd_figure1)

    g = sub.add_parser("gibbs", help="partition-divergence cone probe")
    g.add_argument("--d", type=int, default=30)
    g.add_argument("--n", type=int, default=10)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--z-min-exp", type=float, default=0.0)
    g.add_argument("--z-max-exp", type=float, default=6.0)
    g.add_argument("--z-points", type=int, default=25)
    g.add_argument("--out", default="gibbs_probe")
    g.set_defaults(func=_cmd_gibbs)

    s = sub.add_parser("statdim", help="statistical dimension of the positive orthant, MC")
    s.add_argument("--d", type=int, required=True)
    s.add_argument("--samples", type=int, default=100_000)
    s.add_argument("--seed", type=int, default=0)
    s.set_defaults(func=_cmd_statdim)

    i = sub.add_parser("intersect", help="random-subspace positive-direction frequency")
    i.add_argument("--d", type=int, required=True)
    i.add_argument("--n", type=int, required=True)
    i.add_argument("--trials", type=int, default=200)
    i.add_argument("--seed", type=int, default=0)
    i.set_defaults(func=_cmd_intersect)

    w = sub.add_parser("walk", help="toy-walk ensemble statistics to CSV")
    w.add_argument("--kind", choices=["multiplicative", "additive"], required=True)
    w.add_argument("--eta", type=float, required=True)
    w.add_argument("--steps", type=int, default=200)
    w.add_argument("--trials", type=int, default=10_000)
    w.add_argument("--threshold", type=float, default=1e-3)
    w.add_argument("--seed", type=int, default=0)
    w.add_argument("--out", default="walk.csv")
    w.set_defaults(func=_cmd_walk)

    rep = sub.add_parser("report", help="summarize an existing run directory")
    rep.add_argument("run_dir")
    rep.add_argument("--epsilon", type=float, default=0.1)
    rep.set_defaults(func=_cmd_report)
    return p


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 1 if exc.code not in (0, None) else 0
    try:
        return args.func(args)
    except (ConfigError, ValueError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except Exception as exc:  # runtime failure
        print(f"runtime failure: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())

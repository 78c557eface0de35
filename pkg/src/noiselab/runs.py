"""Run-directory layout, CSV/manifest serialization, and the experiment grid runner.

Layout contract (consumed by the plotting package and the summary command):

    <out>/<engine-label>/<seed>/trajectory.csv   one file per (engine, seed)
    <out>/<engine-label>/<seed>/manifest.json    full reproduction config
    <out>/summary.json                           per-engine aggregates

trajectory.csv header (stable):
    step,train_loss,test_error,linf,l1,l2,linf_err_S,l1_Sbar,potential,min_entry,diverged
"""

from __future__ import annotations

import csv
import json
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass
from pathlib import Path

import numpy as np

from .engines import NoiseSpec
from .model import generate_dataset, uniform_init
from .trainer import ScheduleSpec, TrajectoryRecord, run_trajectory

CSV_HEADER = [
    "step", "train_loss", "test_error", "linf", "l1", "l2",
    "linf_err_S", "l1_Sbar", "potential", "min_entry", "diverged",
]

WORKERS_ENV = "NOISELAB_WORKERS"


def write_trajectory_csv(path: str | Path, records: list[TrajectoryRecord]) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(CSV_HEADER)
        for rec in records:
            writer.writerow([
                rec.step, repr(rec.train_loss), repr(rec.test_error),
                repr(rec.linf), repr(rec.l1), repr(rec.l2),
                repr(rec.linf_err_s), repr(rec.l1_sbar),
                repr(rec.potential), repr(rec.min_entry),
                int(rec.diverged),
            ])


def read_trajectory_csv(path: str | Path) -> list[TrajectoryRecord]:
    out = []
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames != CSV_HEADER:
            raise ValueError(f"unexpected CSV header in {path}: {reader.fieldnames}")
        for row in reader:
            out.append(TrajectoryRecord(
                step=int(row["step"]),
                train_loss=float(row["train_loss"]),
                test_error=float(row["test_error"]),
                linf=float(row["linf"]),
                l1=float(row["l1"]),
                l2=float(row["l2"]),
                linf_err_s=float(row["linf_err_S"]),
                l1_sbar=float(row["l1_Sbar"]),
                potential=float(row["potential"]),
                min_entry=float(row["min_entry"]),
                diverged=bool(int(row["diverged"])),
            ))
    return out


@dataclass(frozen=True)
class RunJob:
    """One (engine, seed) cell of an experiment grid."""

    engine: NoiseSpec
    schedule: ScheduleSpec
    dataset_params: dict        # d, n, r, seed (dataset seed may differ from run seed)
    seed: int
    init_scale: float
    log_every: int
    out_dir: str

    def engine_dir(self) -> Path:
        return Path(self.out_dir) / self.engine.label()


def _json_safe(obj):
    """Replace non-finite floats with None so documents stay strict JSON."""
    if isinstance(obj, dict):
        return {k: _json_safe(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_json_safe(v) for v in obj]
    if isinstance(obj, float) and not np.isfinite(obj):
        return None
    return obj


def _manifest(job: RunJob, result, ground_truth: np.ndarray) -> dict:
    from . import __version__
    final_v = result.final_v
    doc = {
        "schema": 1,
        "package_version": __version__,
        "rng": "philox",
        "dataset": dict(job.dataset_params),
        "engine": asdict(job.engine),
        "schedule": [[eta, steps] for eta, steps in job.schedule.stages],
        "seed": job.seed,
        "init_scale": job.init_scale,
        "log_every": job.log_every,
        "diverged": result.diverged,
        "diverged_step": result.diverged_step,
        "final_test_error": result.final.test_error,
        "final_train_loss": result.final.train_loss,
    }
    if np.isfinite(final_v).all():
        doc["final_linf_error"] = float(np.abs(final_v - ground_truth).max())
        doc["verdicts"] = _final_verdicts(job, final_v, np.nonzero(ground_truth)[0])
    else:
        doc["final_linf_error"] = None
        doc["verdicts"] = {"stage0": None, "stage1": None}
    return doc


def _final_verdicts(job: RunJob, final_v: np.ndarray, support: np.ndarray) -> dict:
    """Phase verdicts evaluated at the final iterate (eps1 fixed at 0.5).

    The shrink-phase verdict needs a noise level; it is reported only for
    noise-carrying engines and only when the iterate stayed nonnegative.
    """
    from dataclasses import asdict as _asdict

    from .diagnostics import stage0_verdict, stage1_verdict

    out = {"stage0": None}
    if job.engine.delta > 0 and final_v.min() >= 0:
        eta_last = job.schedule.stages[-1][0]
        out["stage0"] = _asdict(stage0_verdict(final_v, len(final_v), eta_last * job.engine.delta))
    out["stage1"] = _asdict(stage1_verdict(final_v, support, eps1=0.5))
    return out


def run_job(job: RunJob) -> dict:
    """Execute one grid cell and write its trajectory.csv + manifest.json."""
    ds = generate_dataset(**job.dataset_params)
    v0 = uniform_init(ds.d, job.init_scale)
    result = run_trajectory(ds, v0, job.engine, job.schedule,
                            log_every=job.log_every, seed=job.seed)
    cell = job.engine_dir() / str(job.seed)
    cell.mkdir(parents=True, exist_ok=True)
    write_trajectory_csv(cell / "trajectory.csv", result.records)
    manifest = _json_safe(_manifest(job, result, ds.ground_truth))
    (cell / "manifest.json").write_text(json.dumps(manifest, indent=1))
    return manifest


def max_workers() -> int:
    env = os.environ.get(WORKERS_ENV)
    if env:
        return max(1, int(env))
    return max(1, os.cpu_count() or 1)


def run_grid(jobs: list[RunJob], workers: int | None = None) -> list[dict]:
    """Run every job, in parallel when more than one worker is available."""
    workers = workers if workers is not None else max_workers()
    workers = min(workers, len(jobs)) or 1
    if workers == 1:
        return [run_job(job) for job in jobs]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(run_job, jobs))


def summarize_runs(run_dir: str | Path, recovery_epsilon: float = 0.1) -> dict:
    """Aggregate final records per engine; written to <run_dir>/summary.json.

    Recovery rate counts runs whose final sup-norm distance to the ground
    truth (from the manifest) is at most recovery_epsilon.
    """
    run_dir = Path(run_dir)
    engines = {}
    for engine_dir in sorted(p for p in run_dir.iterdir() if p.is_dir()):
        rows = []
        for cell in sorted(engine_dir.iterdir(), key=lambda p: p.name):
            csv_path = cell / "trajectory.csv"
            if not csv_path.exists():
                continue
            records = read_trajectory_csv(csv_path)
            manifest = json.loads((cell / "manifest.json").read_text())
            rows.append((int(cell.name), records[-1], manifest))
        if not rows:
            continue
        finals = [rec for _, rec, _ in rows]
        test_errors = [rec.test_error for rec in finals]
        linf_errors = [m.get("final_linf_error") for _, _, m in rows]
        recovered = [e is not None and e <= recovery_epsilon for e in linf_errors]
        engines[engine_dir.name] = {
            "runs": len(rows),
            "seeds": [s for s, _, _ in rows],
            "diverged": sum(rec.diverged for rec in finals),
            "final_test_error": {
                "values": test_errors,
                "median": _nanmedian(test_errors),
                "q25": _nanquantile(test_errors, 0.25),
                "q75": _nanquantile(test_errors, 0.75),
            },
            "final_train_loss": {
                "values": [rec.train_loss for rec in finals],
                "median": _nanmedian([rec.train_loss for rec in finals]),
            },
            "final_linf_error": linf_errors,
            "recovery_rate": sum(recovered) / len(rows),
            "recovery_epsilon": recovery_epsilon,
        }
    if not engines:
        raise ValueError(f"no runs found under {run_dir}")
    summary = _json_safe({"schema": 1, "engines": engines})
    (run_dir / "summary.json").write_text(json.dumps(summary, indent=1))
    return summary


def _nanmedian(vals):
    arr = np.asarray(vals, dtype=float)
    finite = arr[np.isfinite(arr)]
    return float(np.median(finite)) if len(finite) else float("nan")


def _nanquantile(vals, q):
    arr = np.asarray(vals, dtype=float)
    finite = arr[np.isfinite(arr)]
    return float(np.quantile(finite, q)) if len(finite) else float("nan")

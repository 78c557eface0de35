"""Regenerate the train/test-error panels from a run directory.

Consumes only the documented run-directory contract:

    <run_dir>/<engine>/<seed>/trajectory.csv
    header: step,train_loss,test_error,linf,l1,l2,linf_err_S,l1_Sbar,potential,min_entry,diverged

Each panel shows one curve per engine (median across seeds with an
interquartile band when more than one seed is present; single runs plot
as-is). Engines named gaussian_* ran 4x longer than the rest, so their x axis
is divided by 4 to share the iteration axis. Rendering never writes inside
the run directory.
"""

from __future__ import annotations

import argparse
import csv
import sys
from dataclasses import dataclass, field
from pathlib import Path

import matplotlib
import numpy as np

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402  (backend must be pinned first)

CSV_HEADER = [
    "step", "train_loss", "test_error", "linf", "l1", "l2",
    "linf_err_S", "l1_Sbar", "potential", "min_entry", "diverged",
]

PANEL_COLUMNS = {"train": "train_loss", "test": "test_error"}

GAUSSIAN_PREFIX = "gaussian"
GAUSSIAN_X_SCALE = 4.0


@dataclass(frozen=True)
class PlotSpec:
    run_dir: Path
    panel: str                    # "train" or "test"
    out: Path
    engines: tuple[str, ...] | None = None   # None: every engine directory

    def __post_init__(self):
        if self.panel not in PANEL_COLUMNS:
            raise ValueError(f"panel must be one of {sorted(PANEL_COLUMNS)}, got {self.panel!r}")


@dataclass
class Curve:
    engine: str
    x: np.ndarray                 # iteration axis after any engine rescale
    median: np.ndarray
    q25: np.ndarray
    q75: np.ndarray
    seeds: list[int] = field(default_factory=list)


def read_series(csv_path: Path, column: str) -> tuple[np.ndarray, np.ndarray]:
    """(steps, values) for one trajectory file; validates the header."""
    with open(csv_path, newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames != CSV_HEADER:
            raise ValueError(f"unexpected CSV header in {csv_path}: {reader.fieldnames}")
        steps, vals = [], []
        for row in reader:
            steps.append(int(row["step"]))
            vals.append(float(row[column]))
    if not steps:
        raise ValueError(f"empty trajectory file: {csv_path}")
    return np.asarray(steps), np.asarray(vals)


def discover_engines(run_dir: Path) -> list[str]:
    engines = sorted(
        p.name for p in run_dir.iterdir()
        if p.is_dir() and any(cell.joinpath("trajectory.csv").exists() for cell in p.iterdir())
    )
    if not engines:
        raise ValueError(f"no engine run directories under {run_dir}")
    return engines


def engine_curve(run_dir: Path, engine: str, column: str) -> Curve:
    """Median curve (with quartiles) across the engine's seeds.

    Seeds are aligned on the union of logged steps; at steps where a run has
    no row (for instance after an early divergence halt) it simply does not
    contribute.
    """
    cells = sorted((run_dir / engine).iterdir(), key=lambda p: p.name)
    series = []
    seeds = []
    for cell in cells:
        csv_path = cell / "trajectory.csv"
        if not csv_path.exists():
            continue
        series.append(read_series(csv_path, column))
        seeds.append(int(cell.name))
    if not series:
        raise ValueError(f"engine {engine!r} has no runs in {run_dir}")
    all_steps = np.unique(np.concatenate([s for s, _ in series]))
    stacked = np.full((len(series), len(all_steps)), np.nan)
    for row, (steps, vals) in enumerate(series):
        stacked[row, np.searchsorted(all_steps, steps)] = vals
    x = all_steps / GAUSSIAN_X_SCALE if engine.startswith(GAUSSIAN_PREFIX) else all_steps.astype(float)
    return Curve(
        engine=engine,
        x=x,
        median=np.nanmedian(stacked, axis=0),
        q25=np.nanquantile(stacked, 0.25, axis=0),
        q75=np.nanquantile(stacked, 0.75, axis=0),
        seeds=seeds,
    )


def render_figure(spec: PlotSpec) -> tuple[plt.Figure, dict[str, Curve]]:
    """Write one panel image; returns the figure and the plotted curves."""
    run_dir = Path(spec.run_dir)
    column = PANEL_COLUMNS[spec.panel]
    engines = list(spec.engines) if spec.engines else discover_engines(run_dir)

    curves = {}
    fig, ax = plt.subplots(figsize=(7.0, 4.5))
    for engine in engines:
        curve = engine_curve(run_dir, engine, column)
        curves[engine] = curve
        finite = np.isfinite(curve.median)
        ax.plot(curve.x, curve.median, label=engine)
        if len(curve.seeds) > 1 and finite.any():
            ax.fill_between(curve.x, curve.q25, curve.q75, alpha=0.2)
    ax.set_yscale("log")
    ax.set_xlabel("iteration (gaussian runs rescaled by 1/4)")
    ax.set_ylabel({"train": "training loss", "test": "test error"}[spec.panel])
    ax.legend(fontsize=8)
    ax.set_title(f"{spec.panel} panel: {run_dir.name}")
    fig.tight_layout()
    out = Path(spec.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(out, dpi=150)
    return fig, curves


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(prog="noiselab-plot", description=__doc__)
    parser.add_argument("--run-dir", required=True)
    parser.add_argument("--panel", choices=sorted(PANEL_COLUMNS), required=True)
    parser.add_argument("--out", required=True)
    parser.add_argument("--engines", help="comma list; default: all engine directories")
    args = parser.parse_args(argv)
    engines = tuple(args.engines.split(",")) if args.engines else None
    try:
        spec = PlotSpec(run_dir=Path(args.run_dir), panel=args.panel,
                        out=Path(args.out), engines=engines)
        fig, _ = render_figure(spec)
        plt.close(fig)
    except (ValueError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())

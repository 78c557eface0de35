"""One-dimensional warm-up walks: multiplicative noise versus additive noise.

Both walks have mean-zero updates, so the ensemble mean is preserved; the
multiplicative walk's noise scales with the state, which drives sqrt(v) down
geometrically (each step multiplies E[sqrt(v)] by E[sqrt(1 + eta*xi)] < 1)
and collapses v to zero with high probability, while the additive walk just
spreads out.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

WALK_KINDS = ("multiplicative", "additive")


@dataclass(frozen=True)
class WalkConfig:
    kind: str
    eta: float
    steps: int
    v0: float = 1.0
    seed: int = 0
    dims: int = 1                   # multiplicative only: independent parallel walks
    shared_variance: bool = False   # multiplicative, dims > 1: same kick size ||v||_2 on every coordinate

    def __post_init__(self):
        if self.kind not in WALK_KINDS:
            raise ValueError(f"unknown walk kind {self.kind!r}")
        if self.steps < 1:
            raise ValueError("steps must be >= 1")
        if self.kind == "multiplicative":
            if not 0 < self.eta < 1:
                raise ValueError("multiplicative walk needs eta in (0, 1) to stay nonnegative")
        elif self.eta <= 0:
            raise ValueError("additive walk needs eta > 0")
        if self.dims < 1:
            raise ValueError("dims must be >= 1")
        if self.kind == "additive" and self.dims != 1:
            raise ValueError("parallel dims are a multiplicative-walk option")


def sqrt_potential(v: float | np.ndarray) -> float:
    """sum_k sqrt(v_k); NaN when any coordinate is negative."""
    v = np.atleast_1d(np.asarray(v, dtype=float))
    if v.min() < 0:
        return float("nan")
    return float(np.sqrt(v).sum())


def run_walk(cfg: WalkConfig, signs: np.ndarray | None = None) -> list[tuple[int, float | np.ndarray, float]]:
    """Full trajectory of (step, v, sqrt potential), including step 0.

    `signs` optionally forces the multiplicative walk's +-1 draws (shape
    (steps,) for dims == 1) for hand-checked cases.
    """
    rng = np.random.Generator(np.random.Philox(key=cfg.seed))
    scalar = cfg.dims == 1
    v = float(cfg.v0) if scalar else np.full(cfg.dims, float(cfg.v0))
    out = [(0, v, sqrt_potential(v))]
    for t in range(1, cfg.steps + 1):
        if cfg.kind == "multiplicative":
            if signs is not None:
                xi = signs[t - 1]
            elif scalar:
                xi = 2.0 * float(rng.integers(0, 2)) - 1.0
            else:
                xi = 2.0 * rng.integers(0, 2, size=cfg.dims).astype(float) - 1.0
            if cfg.shared_variance and not scalar:
                v = v + cfg.eta * xi * float(np.linalg.norm(v))
            else:
                v = v + cfg.eta * xi * v
        else:
            v = v + cfg.eta * float(rng.standard_normal())
        out.append((t, v, sqrt_potential(v)))
    return out


@dataclass(frozen=True)
class EnsembleStats:
    """Per-checkpoint ensemble summaries over independent trials."""

    checkpoints: np.ndarray     # (k,)
    mean_v: np.ndarray
    stderr_v: np.ndarray
    mean_sqrt_v: np.ndarray     # NaN-free only while trajectories stay nonnegative
    stderr_sqrt_v: np.ndarray
    frac_below: dict            # threshold -> (k,) fraction with |v| < threshold


def log_spaced_checkpoints(steps: int) -> np.ndarray:
    """1, 2, 4, 8, ... capped at and including `steps`."""
    pts = []
    t = 1
    while t < steps:
        pts.append(t)
        t *= 2
    pts.append(steps)
    return np.array(pts)


def walk_ensemble_stats(
    cfg: WalkConfig,
    trials: int,
    checkpoints: np.ndarray | None = None,
    thresholds: tuple[float, ...] = (1e-3,),
) -> EnsembleStats:
    """Simulate `trials` independent scalar walks and summarize at checkpoints.

    Trials use per-trial substreams spawned from cfg.seed; the whole ensemble
    is vectorized across trials.
    """
    if trials < 100:
        raise ValueError("need at least 100 trials")
    if cfg.dims != 1:
        raise ValueError("ensemble statistics are defined for scalar walks")
    checkpoints = log_spaced_checkpoints(cfg.steps) if checkpoints is None else np.asarray(checkpoints)
    if checkpoints.min() < 1 or checkpoints.max() > cfg.steps:
        raise ValueError("checkpoints must lie in [1, steps]")
    rng = np.random.Generator(np.random.Philox(key=cfg.seed))
    v = np.full(trials, float(cfg.v0))
    cp_set = set(int(c) for c in checkpoints)

    mean_v, se_v, mean_s, se_s = [], [], [], []
    fracs = {thr: [] for thr in thresholds}
    for t in range(1, cfg.steps + 1):
        if cfg.kind == "multiplicative":
            xi = 2.0 * rng.integers(0, 2, size=trials).astype(float) - 1.0
            v = v * (1.0 + cfg.eta * xi)
        else:
            v = v + cfg.eta * rng.standard_normal(trials)
        if t in cp_set:
            mean_v.append(v.mean())
            se_v.append(v.std(ddof=1) / np.sqrt(trials))
            s = np.sqrt(v) if cfg.kind == "multiplicative" else np.sqrt(np.abs(v))
            mean_s.append(s.mean())
            se_s.append(s.std(ddof=1) / np.sqrt(trials))
            for thr in thresholds:
                fracs[thr].append(float(np.mean(np.abs(v) < thr)))
    return EnsembleStats(
        checkpoints=np.asarray(sorted(cp_set)),
        mean_v=np.array(mean_v),
        stderr_v=np.array(se_v),
        mean_sqrt_v=np.array(mean_s),
        stderr_sqrt_v=np.array(se_s),
        frac_below={thr: np.array(fr) for thr, fr in fracs.items()},
    )


def multiplicative_sqrt_decay_factor(eta: float) -> float:
    """Per-step factor E[sqrt(1 + eta*xi)] = (sqrt(1+eta) + sqrt(1-eta)) / 2."""
    return 0.5 * (np.sqrt(1.0 + eta) + np.sqrt(1.0 - eta))

"""Multi-stage trajectory runner with per-step metrics logging.

A trajectory applies one engine under a piecewise-constant learning-rate plan,
logging a TrajectoryRecord every `log_every` steps (plus the first and last
step). Divergence is a recorded terminal state, not an exception: the last
record carries diverged=True and nothing is emitted after it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import engines
from .engines import NoiseSpec, StepContext
from .model import Dataset, full_loss, test_error


@dataclass(frozen=True)
class ScheduleSpec:
    """Ordered (learning rate, step count) stages."""

    stages: tuple[tuple[float, int], ...]

    def __post_init__(self):
        if not self.stages:
            raise ValueError("schedule needs at least one stage")
        for eta, steps in self.stages:
            if not (np.isfinite(eta) and eta > 0):
                raise ValueError(f"stage learning rate must be finite and positive, got {eta}")
            if steps < 1:
                raise ValueError(f"stage length must be >= 1, got {steps}")

    @property
    def total_steps(self) -> int:
        return sum(s for _, s in self.stages)

    def eta_at(self, t: int) -> float:
        """Learning rate used for the update from step t to t+1."""
        if t < 0:
            raise ValueError("step index must be >= 0")
        for eta, steps in self.stages:
            if t < steps:
                return eta
            t -= steps
        raise ValueError("step index beyond schedule end")

    @classmethod
    def constant(cls, eta: float, steps: int) -> "ScheduleSpec":
        return cls(stages=((eta, steps),))


def three_stage_schedule(
    delta: float,
    epsilon: float = 0.1,
    c0: float = 0.01,
    c1: float = 0.001,
    c2: float = 0.01,
    kappa0: float = 60.0,
    kappa1: float = 100.0,
    kappa2: float = 10.0,
    t0: int | None = None,
    t1: int | None = None,
    t2: int | None = None,
) -> ScheduleSpec:
    """Three-phase plan: eta0 = c0/delta, eta1 = c1/delta^2, eta2 = c2*eps^2/delta^2.

    Stage lengths default to t0 = ceil(kappa0/(eta0*delta)^2), t_s = ceil(kappa_s/eta_s);
    the shipped multipliers were calibrated on the d=100, n=40, r=5, unit-init
    benchmark (label noise, delta=1) and give etas (1e-2, 1e-3, 1e-4) with
    stage lengths (6e5, 1e5, 1e5) there.
    """
    if delta <= 0:
        raise ValueError("delta must be positive")
    if not 0 < epsilon < 1:
        raise ValueError("epsilon must lie in (0, 1)")
    if min(c0, c1, c2, kappa0, kappa1, kappa2) <= 0:
        raise ValueError("multipliers must be positive")
    eta0 = c0 / delta
    eta1 = c1 / delta**2
    eta2 = c2 * epsilon**2 / delta**2
    t0 = t0 if t0 is not None else math.ceil(kappa0 / (eta0 * delta) ** 2)
    t1 = t1 if t1 is not None else math.ceil(kappa1 / eta1)
    t2 = t2 if t2 is not None else math.ceil(kappa2 / eta2)
    return ScheduleSpec(stages=((eta0, t0), (eta1, t1), (eta2, t2)))


@dataclass(frozen=True)
class TrajectoryRecord:
    """Metrics at one logged step."""

    step: int
    train_loss: float
    test_error: float
    linf: float
    l1: float
    l2: float
    linf_err_s: float      # ||v_S - g_S||_inf
    l1_sbar: float         # ||v_{S^c}||_1
    potential: float       # sum_k sqrt(v_k) when v >= 0, else NaN
    min_entry: float
    diverged: bool


@dataclass
class TrajectoryResult:
    records: list[TrajectoryRecord]
    final_v: np.ndarray
    diverged: bool
    diverged_step: int | None
    iterates: list[np.ndarray]       # populated when iterate_log_every > 0

    @property
    def final(self) -> TrajectoryRecord:
        return self.records[-1]


def _make_record(step: int, v: np.ndarray, ds: Dataset, diverged: bool) -> TrajectoryRecord:
    g = ds.ground_truth
    finite = bool(np.isfinite(v).all())
    if finite:
        train = full_loss(v, ds)
        test = test_error(v, g)
    else:
        train = test = float("nan")
    absv = np.abs(v)
    return TrajectoryRecord(
        step=step,
        train_loss=train,
        test_error=test,
        linf=float(absv.max()),
        l1=float(absv.sum()),
        l2=float(np.linalg.norm(v)),
        linf_err_s=float(np.abs(v[ds.support] - g[ds.support]).max()) if ds.r else 0.0,
        l1_sbar=float(absv[ds.off_support()].sum()),
        potential=float(np.sqrt(v).sum()) if finite and v.min() >= 0 else float("nan"),
        min_entry=float(v.min()),
        diverged=diverged,
    )


_STEPPERS = {
    "gd": lambda v, ds, ctx, spec: engines.step_gd(v, ds, ctx),
    "plain_sgd": lambda v, ds, ctx, spec: engines.step_plain_sgd(v, ds, ctx),
    "label_noise": lambda v, ds, ctx, spec: engines.step_label_noise(v, ds, ctx, spec.delta),
    "minibatch_sim": lambda v, ds, ctx, spec: engines.step_minibatch_sim(v, ds, ctx, spec.delta),
    "gaussian": lambda v, ds, ctx, spec: engines.step_gaussian(v, ds, ctx, spec.resolve_sigma(ctx.eta)),
}


def run_trajectory(
    ds: Dataset,
    v0: np.ndarray,
    engine: NoiseSpec,
    schedule: ScheduleSpec,
    log_every: int = 1000,
    seed: int = 0,
    iterate_log_every: int = 0,
) -> TrajectoryResult:
    """Run the engine through the schedule; deterministic for a given seed.

    The trajectory owns one Philox stream keyed by `seed`; engines consume it
    in their documented per-step draw order, so replays are bit-exact.
    """
    if log_every < 1:
        raise ValueError("log_every must be >= 1")
    v = np.array(v0, dtype=float, copy=True)
    if v.shape != (ds.d,):
        raise ValueError(f"v0 has shape {v.shape}, expected ({ds.d},)")
    rng = np.random.Generator(np.random.Philox(key=seed))
    stepper = _STEPPERS[engine.kind]

    records = [_make_record(0, v, ds, False)]
    iterates = [v.copy()] if iterate_log_every else []
    t = 0
    diverged_step = None
    for eta, steps in schedule.stages:
        ctx = StepContext(eta=eta, rng=rng)
        for _ in range(steps):
            v = stepper(v, ds, ctx, engine)
            t += 1
            if engines.is_diverged(v):
                diverged_step = t
                records.append(_make_record(t, v, ds, True))
                break
            if iterate_log_every and t % iterate_log_every == 0:
                iterates.append(v.copy())
            if t % log_every == 0:
                records.append(_make_record(t, v, ds, False))
        if diverged_step is not None:
            break
    if diverged_step is None and records[-1].step != t:
        records.append(_make_record(t, v, ds, False))
    return TrajectoryResult(
        records=records,
        final_v=v,
        diverged=diverged_step is not None,
        diverged_step=diverged_step,
        iterates=iterates,
    )

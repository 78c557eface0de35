"""One optimization step for each stochastic update rule.

All engines share the signature step_*(v, ds, ctx, ...) -> new parameter vector
and are pure given the rng stream carried by the context. Draw order per step
is fixed so trajectories replay exactly: example indices first, then the sign
bit or Gaussian vector.

    gd             v' = v - eta * full_grad(v)
    plain_sgd      single uniformly-sampled example, no injected noise
    label_noise    sampled example with a +-delta perturbation of its label
    minibatch_sim  full gradient + delta * (example-grad difference of a
                   uniform independent pair i, j; i == j allowed)
    gaussian       full gradient + eta * sigma * N(0, I) per coordinate

For label noise the per-coordinate update factor is
1 - eta*(resid - s)*x_k, so the iterate stays elementwise nonnegative as long
as eta*(delta + |resid|)*max|x| < 1; past that boundary coordinates can flip
sign (the loss is sign-blind but recovery in v is not).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .model import Dataset, full_grad

ENGINE_KINDS = ("gd", "plain_sgd", "label_noise", "minibatch_sim", "gaussian")

DIVERGENCE_CAP = 1e12


@dataclass
class NoiseSpec:
    """Which update engine to run and at what noise magnitude.

    For the gaussian kind exactly one of sigma / lambda_temp must be set;
    lambda_temp is the temperature parameterization, equivalent to a
    per-coordinate standard deviation sigma = sqrt(2 / (lambda_temp * eta))
    at learning rate eta.
    """

    kind: str
    delta: float = 0.0
    sigma: float | None = None
    lambda_temp: float | None = None

    def __post_init__(self):
        if self.kind not in ENGINE_KINDS:
            raise ValueError(f"unknown engine kind {self.kind!r}; expected one of {ENGINE_KINDS}")
        if self.delta < 0:
            raise ValueError("delta must be >= 0")
        if self.kind == "gaussian":
            if (self.sigma is None) == (self.lambda_temp is None):
                raise ValueError("gaussian engine needs exactly one of sigma / lambda_temp")
            if self.sigma is not None and self.sigma < 0:
                raise ValueError("sigma must be >= 0")
            if self.lambda_temp is not None and self.lambda_temp <= 0:
                raise ValueError("lambda_temp must be > 0")
        elif self.sigma is not None or self.lambda_temp is not None:
            raise ValueError(f"sigma/lambda_temp only apply to the gaussian kind, not {self.kind!r}")

    def resolve_sigma(self, eta: float) -> float:
        """Canonical per-coordinate noise std at the given learning rate."""
        if self.sigma is not None:
            return self.sigma
        return sigma_from_lambda(self.lambda_temp, eta)

    def label(self) -> str:
        """Directory-safe name for run layouts."""
        if self.kind == "gaussian":
            if self.sigma is not None:
                return f"gaussian_s{self.sigma:g}"
            return f"gaussian_l{self.lambda_temp:g}"
        return self.kind


def sigma_from_lambda(lambda_temp: float, eta: float) -> float:
    """Noise std making eta-step Gaussian GD match the temperature form."""
    if lambda_temp <= 0 or eta <= 0:
        raise ValueError("lambda_temp and eta must be positive")
    return math.sqrt(2.0 / (lambda_temp * eta))


@dataclass
class StepContext:
    """Learning rate plus the deterministic draw stream for one trajectory.

    eta is positive in any real schedule; zero is tolerated so that the
    eta=0-is-identity property is expressible.
    """

    eta: float
    rng: np.random.Generator = field(repr=False, default=None)

    def __post_init__(self):
        if not (np.isfinite(self.eta) and self.eta >= 0):
            raise ValueError(f"eta must be finite and nonnegative, got {self.eta}")


def _draw_index(rng: np.random.Generator, n: int) -> int:
    return int(rng.integers(0, n))


def _draw_sign(rng: np.random.Generator) -> float:
    return 2.0 * float(rng.integers(0, 2)) - 1.0


def step_gd(v: np.ndarray, ds: Dataset, ctx: StepContext) -> np.ndarray:
    """Noise-free full-batch descent step."""
    return v - ctx.eta * full_grad(v, ds)


def step_label_noise(v: np.ndarray, ds: Dataset, ctx: StepContext, delta: float) -> np.ndarray:
    """Single-example stochastic step with the sampled label perturbed by +-delta.

    Draws: example index, then sign bit. With delta=0 this is plain SGD.
    """
    i = _draw_index(ctx.rng, ds.n)
    s = delta * _draw_sign(ctx.rng)
    x = ds.x[i]
    resid = (v * v) @ x - ds.y[i]
    return v - (ctx.eta * (resid - s)) * (x * v)


def step_plain_sgd(v: np.ndarray, ds: Dataset, ctx: StepContext) -> np.ndarray:
    """Single-example stochastic step; consumes the same draws as label noise."""
    return step_label_noise(v, ds, ctx, 0.0)


def step_minibatch_sim(v: np.ndarray, ds: Dataset, ctx: StepContext, delta: float) -> np.ndarray:
    """Full-gradient step plus delta times a mean-zero example-grad difference.

    Draws: index i, then index j (independent; i == j gives a plain gd step,
    which keeps the average over ordered pairs exactly equal to gd).
    """
    i = _draw_index(ctx.rng, ds.n)
    j = _draw_index(ctx.rng, ds.n)
    g = full_grad(v, ds)
    u = v * v
    ri = u @ ds.x[i] - ds.y[i]
    rj = u @ ds.x[j] - ds.y[j]
    noise = delta * (ri * ds.x[i] - rj * ds.x[j]) * v
    return v - ctx.eta * (g + noise)


def step_gaussian(v: np.ndarray, ds: Dataset, ctx: StepContext, sigma: float) -> np.ndarray:
    """Full-gradient step plus spherical Gaussian noise of std eta*sigma.

    Draws: one standard normal vector of dimension d.
    """
    xi = ctx.rng.standard_normal(v.shape[0])
    return v - ctx.eta * full_grad(v, ds) + (ctx.eta * sigma) * xi


def step(v: np.ndarray, ds: Dataset, ctx: StepContext, spec: NoiseSpec) -> np.ndarray:
    """Dispatch one step according to the noise spec."""
    if spec.kind == "gd":
        return step_gd(v, ds, ctx)
    if spec.kind == "plain_sgd":
        return step_plain_sgd(v, ds, ctx)
    if spec.kind == "label_noise":
        return step_label_noise(v, ds, ctx, spec.delta)
    if spec.kind == "minibatch_sim":
        return step_minibatch_sim(v, ds, ctx, spec.delta)
    if spec.kind == "gaussian":
        return step_gaussian(v, ds, ctx, spec.resolve_sigma(ctx.eta))
    raise ValueError(f"unknown engine kind {spec.kind!r}")


def is_diverged(v: np.ndarray, cap: float = DIVERGENCE_CAP) -> bool:
    """True on any non-finite entry or sup-norm above the cap."""
    m = float(np.abs(v).max())
    return not (m <= cap)

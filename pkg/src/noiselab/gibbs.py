"""Probes for the divergence of the Gibbs normalizer in the overparameterized regime.

The loss is constant along translations of u = v**2 inside the orthocomplement
of the data span. When that subspace contains an elementwise-positive
direction mu, a cone around mu maps into the positive orthant and the
change-of-variables integrand (2cz)^(d-n-1) * prod_i (u*_i + 2 mu_i z)^(-1/2)
has degree (d-n-1) - d/2 in z, so its partial integrals grow like
Z^(d/2 - n) whenever n < d/2: the normalizer is infinite and no stationary
density exists. Everything here is numerical: orthonormal bases, a
margin-maximizing feasibility program, Monte Carlo for the statistical
dimension of the positive orthant, and log-space quadrature for the
partial integrals.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import quad
from scipy.linalg import null_space, qr
from scipy.optimize import linprog

from .model import Dataset


class SolverError(RuntimeError):
    """The feasibility solver failed outright (distinct from 'infeasible')."""


def orthocomplement_basis(x: np.ndarray | Dataset, rtol: float = 1e-10) -> np.ndarray:
    """Orthonormal basis (columns) of the subspace orthogonal to every data row.

    Requires the rows to be linearly independent (generic for Gaussian data).
    """
    if isinstance(x, Dataset):
        x = x.x
    x = np.asarray(x, dtype=float)
    n, d = x.shape
    if n == 0:
        return np.eye(d)
    if np.linalg.matrix_rank(x) < n:
        raise ValueError(f"data rows are rank-deficient (rank < n = {n})")
    basis = null_space(x, rcond=rtol)
    if basis.shape != (d, d - n):
        raise ValueError(f"unexpected null-space shape {basis.shape}")
    return basis


def find_positive_direction(
    basis: np.ndarray,
    tol: float = 1e-9,
    polish_iters: int = 60,
) -> np.ndarray | None:
    """Unit vector with all entries positive inside span(basis), or None.

    Fast path: project the all-ones vector onto the subspace and polish with
    a few projected-subgradient steps on the margin; a strictly positive
    result certifies feasibility directly. Otherwise fall back to the exact
    margin-maximizing linear program  max t  s.t.  B w >= t*1, ||w||_inf <= 1,
    which also certifies infeasibility (optimal t <= 0).
    """
    basis = np.asarray(basis, dtype=float)
    d, m = basis.shape
    if m == 0:
        return None
    mu = _positive_certificate(basis, polish_iters)
    if mu is not None:
        return mu
    return _positive_direction_lp(basis, tol)


def _positive_certificate(basis: np.ndarray, iters: int) -> np.ndarray | None:
    d, m = basis.shape
    w = basis.T @ np.ones(d)
    scale = np.abs(w).max()
    if scale <= 0:
        return None
    w /= scale
    for it in range(iters):
        y = basis @ w
        i = int(np.argmin(y))
        if y[i] > 1e-8 * np.linalg.norm(y):
            return y / np.linalg.norm(y)
        w = np.clip(w + basis[i] / (1.0 + it), -1.0, 1.0)
    return None


def _positive_direction_lp(basis: np.ndarray, tol: float) -> np.ndarray | None:
    d, m = basis.shape
    cost = np.zeros(m + 1)
    cost[-1] = -1.0
    a_ub = np.hstack([-basis, np.ones((d, 1))])
    res = linprog(
        cost,
        A_ub=a_ub,
        b_ub=np.zeros(d),
        bounds=[(-1, 1)] * m + [(None, None)],
        method="highs",
    )
    if res.status != 0:
        raise SolverError(f"feasibility LP failed: {res.message}")
    if -res.fun <= tol:
        return None
    mu = basis @ res.x[:-1]
    norm = np.linalg.norm(mu)
    if norm <= 0 or mu.min() <= 0:
        return None
    return mu / norm


@dataclass(frozen=True)
class StatDimEstimate:
    estimate: float
    stderr: float
    samples: int


def statistical_dimension_mc(
    d: int,
    samples: int,
    seed: int = 0,
    sampler=None,
    chunk: int = 20_000,
) -> StatDimEstimate:
    """Monte Carlo estimate of E ||Pi_C(g)||^2 for the positive orthant C.

    Pi_C zeroes negative coordinates of the standard Gaussian g; the exact
    value is d/2. `sampler(rng, shape)` overrides the Gaussian draw (test
    hook: an all-positive stream makes the projection the identity, pushing
    the estimate to d).
    """
    if samples < 100:
        raise ValueError("need at least 100 samples")
    rng = np.random.Generator(np.random.Philox(key=seed))
    draw = sampler if sampler is not None else (lambda r, shape: r.standard_normal(shape))
    vals = np.empty(samples)
    done = 0
    while done < samples:
        b = min(chunk, samples - done)
        g = draw(rng, (b, d))
        vals[done:done + b] = (np.maximum(g, 0.0) ** 2).sum(axis=1)
        done += b
    return StatDimEstimate(
        estimate=float(vals.mean()),
        stderr=float(vals.std(ddof=1) / np.sqrt(samples)),
        samples=samples,
    )


def intersection_probability_mc(d: int, n: int, trials: int, seed: int = 0) -> float:
    """Fraction of uniformly random (d-n)-dim subspaces containing a positive vector."""
    if trials < 10:
        raise ValueError("need at least 10 trials")
    if not 0 <= n <= d:
        raise ValueError("need 0 <= n <= d")
    if n == d:
        return 0.0
    rng = np.random.Generator(np.random.Philox(key=seed))
    hits = 0
    for _ in range(trials):
        if n == 0:
            basis = np.eye(d)
        else:
            g = rng.standard_normal((d, d - n))
            basis, _ = qr(g, mode="economic")
        hits += find_positive_direction(basis) is not None
    return hits / trials


def orthonormal_completion(basis: np.ndarray, mu: np.ndarray) -> np.ndarray:
    """Rotate the basis so its first column is mu (must lie in the span)."""
    w = basis.T @ mu
    coeff_norm = np.linalg.norm(w)
    resid = mu - basis @ w
    if np.linalg.norm(resid) > 1e-8 * max(1.0, np.linalg.norm(mu)):
        raise ValueError("mu is not in the span of the basis")
    w = w / coeff_norm
    rot, _ = qr(w.reshape(-1, 1), mode="full")
    if rot[:, 0] @ w < 0:
        rot = -rot
    completed = basis @ rot
    completed[:, 0] = mu / np.linalg.norm(mu)
    return completed


def cone_constant(completion: np.ndarray) -> float | None:
    """Half-width slope c of the positivity-preserving cone around mu.

    For each coordinate i the off-mu basis columns can steal at most
    (d-n-1) * max_j |a_i^j| * (c z) from the mu_i z gain, so
    c = min_i mu_i / ((d-n-1) * max_j |a_i^j|) keeps every coordinate of
    u* + A u~ positive inside the cone. Returns None when there are no
    off-mu columns (ray-only probe). Rows with all-zero off-mu entries
    impose no constraint.
    """
    mu = completion[:, 0]
    rest = completion[:, 1:]
    if mu.min() <= 0:
        raise ValueError("first column must be elementwise positive")
    k = rest.shape[1]
    if k == 0:
        return None
    row_max = np.abs(rest).max(axis=1)
    active = row_max > 0
    if not active.any():
        return float("inf")
    return float((mu[active] / (k * row_max[active])).min())


def sample_cone_points(
    u_star: np.ndarray,
    completion: np.ndarray,
    c: float,
    num_samples: int = 10_000,
    z_max: float = 1e4,
    seed: int = 0,
) -> np.ndarray:
    """Random points u = u* + z*mu + sum_j t_j a^j with |t_j| <= c*z, z in (0, z_max]."""
    rng = np.random.Generator(np.random.Philox(key=seed))
    mu = completion[:, 0]
    rest = completion[:, 1:]
    k = rest.shape[1]
    z = np.exp(rng.uniform(np.log(1e-6), np.log(z_max), size=num_samples))
    pts = u_star[None, :] + z[:, None] * mu[None, :]
    if k:
        t = rng.uniform(-1.0, 1.0, size=(num_samples, k)) * (c * z)[:, None]
        pts = pts + t @ rest.T
    return pts


@dataclass
class ConeProbeReport:
    """Everything the partition-divergence probe measured."""

    d: int
    n: int
    feasible: bool
    mu: np.ndarray | None
    margin: float
    cone_c: float | None
    u_star: np.ndarray | None
    z_grid: np.ndarray
    log_partial_integrals: np.ndarray
    fitted_slope: float
    theoretical_slope: float
    diverging: bool
    tail_increase: float            # relative growth of I over the last decade

    @property
    def partial_integrals(self) -> list[tuple[float, float]]:
        return [(float(z), float(np.exp(li))) for z, li in zip(self.z_grid, self.log_partial_integrals)]

    def to_json(self) -> str:
        return json.dumps({
            "d": self.d,
            "n": self.n,
            "feasible": self.feasible,
            "mu": None if self.mu is None else self.mu.tolist(),
            "margin": self.margin,
            "cone_constant": self.cone_c,
            "u_star": None if self.u_star is None else self.u_star.tolist(),
            "partial_integrals": self.partial_integrals,
            "log_partial_integrals": self.log_partial_integrals.tolist(),
            "fitted_slope": self.fitted_slope,
            "theoretical_slope": self.theoretical_slope,
            "diverging": self.diverging,
            "tail_increase": self.tail_increase,
        })


def _log_integrand(z: float, log2c: float | None, dn1: int, u_star: np.ndarray, mu: np.ndarray) -> float:
    poly = dn1 * (log2c + np.log(z)) if dn1 else 0.0
    return poly - 0.5 * float(np.log(u_star + 2.0 * mu * z).sum())


def partition_divergence_probe(
    ds: Dataset,
    u_star: np.ndarray | None = None,
    z_grid: np.ndarray | None = None,
    quad_rel_tol: float = 1e-8,
) -> ConeProbeReport:
    """Partial integrals I(Z) of the cone-restricted normalizer lower bound.

    Fits the log-log slope of I(Z) over the top decade of the grid; for
    n < d/2 the slope approaches d/2 - n (unbounded normalizer), while for
    n > d/2 the integrals converge to a finite limit.
    """
    d, n = ds.d, ds.n
    if z_grid is None:
        z_grid = np.logspace(0, 6, 25)
    z_grid = np.asarray(z_grid, dtype=float)
    if not (np.diff(z_grid) > 0).all():
        raise ValueError("z_grid must be strictly increasing")

    basis = orthocomplement_basis(ds)
    mu = find_positive_direction(basis)
    theoretical = d / 2.0 - n
    if mu is None:
        return ConeProbeReport(
            d=d, n=n, feasible=False, mu=None, margin=0.0, cone_c=None,
            u_star=None, z_grid=z_grid,
            log_partial_integrals=np.full(len(z_grid), -np.inf),
            fitted_slope=float("nan"), theoretical_slope=theoretical,
            diverging=False, tail_increase=float("nan"),
        )

    completion = orthonormal_completion(basis, mu)
    c = cone_constant(completion)
    dn1 = completion.shape[1] - 1
    if u_star is None:
        u_star = mu / mu.min()
    u_star = np.asarray(u_star, dtype=float)
    if u_star.min() <= 0:
        raise ValueError("u_star must be elementwise positive")

    log2c = None if dn1 == 0 else float(np.log(2.0 * c))
    logh = lambda z: _log_integrand(z, log2c, dn1, u_star, mu)

    log_partials = np.empty(len(z_grid))
    log_acc = -np.inf
    prev = 0.0
    for k, z_hi in enumerate(z_grid):
        if prev == 0.0:
            # first panel in z-space; integrand ~ z^(d-n-1) near 0
            shift = logh(z_hi)
            val, _ = quad(lambda z: np.exp(logh(z) - shift), 0.0, z_hi,
                          epsrel=quad_rel_tol, limit=200)
        else:
            # later panels in w = log z space
            lo, hi = np.log(prev), np.log(z_hi)
            shift = max(logh(prev) + lo, logh(z_hi) + hi)
            val, _ = quad(lambda w: np.exp(logh(np.exp(w)) + w - shift), lo, hi,
                          epsrel=quad_rel_tol, limit=200)
        if val > 0:
            log_acc = np.logaddexp(log_acc, np.log(val) + shift)
        log_partials[k] = log_acc
        prev = z_hi

    top = z_grid >= z_grid[-1] / 10.0
    if top.sum() < 2:
        raise ValueError("z_grid needs at least two points in its top decade")
    slope = float(np.polyfit(np.log(z_grid[top]), log_partials[top], 1)[0])
    tail = float(1.0 - np.exp(log_partials[top.argmax()] - log_partials[-1]))
    return ConeProbeReport(
        d=d, n=n, feasible=True, mu=mu, margin=float(mu.min()), cone_c=c,
        u_star=u_star, z_grid=z_grid, log_partial_integrals=log_partials,
        fitted_slope=slope, theoretical_slope=theoretical,
        diverging=slope > 0.1, tail_increase=tail,
    )

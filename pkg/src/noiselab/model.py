"""Quadratically-parameterized regression model: data, loss, gradients, statistics.

The model predicts f_v(x) = <v**2, x> (elementwise square). Labels are exactly
realizable: y_i = <g**2, x_i> for an r-sparse ground truth g with unit entries
on its support. All functions here are pure; datasets are immutable once built.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np


@dataclass(frozen=True)
class Dataset:
    """Design matrix, labels and the sparse ground truth that generated them."""

    x: np.ndarray                 # (n, d) rows are examples
    y: np.ndarray                 # (n,)
    ground_truth: np.ndarray      # (d,) nonnegative, r-sparse
    support: np.ndarray           # (r,) sorted indices of nonzero entries
    seed: int | None = None
    meta: dict = field(default_factory=dict)

    @property
    def n(self) -> int:
        return self.x.shape[0]

    @property
    def d(self) -> int:
        return self.x.shape[1]

    @property
    def r(self) -> int:
        return len(self.support)

    def off_support(self) -> np.ndarray:
        mask = np.ones(self.d, dtype=bool)
        mask[self.support] = False
        return np.nonzero(mask)[0]

    def to_json(self) -> str:
        doc = {
            "d": self.d,
            "n": self.n,
            "r": self.r,
            "seed": self.seed,
            "support": self.support.tolist(),
            "x": self.x.ravel().tolist(),   # row-major
            "y": self.y.tolist(),
            "ground_truth_value": self.meta.get("ground_truth_value", 1.0),
        }
        return json.dumps(doc)

    @classmethod
    def from_json(cls, text: str) -> "Dataset":
        doc = json.loads(text)
        d, n = doc["d"], doc["n"]
        x = np.asarray(doc["x"], dtype=float).reshape(n, d)
        support = np.asarray(doc["support"], dtype=int)
        g = np.zeros(d)
        g[support] = doc.get("ground_truth_value", 1.0)
        return cls(
            x=x,
            y=np.asarray(doc["y"], dtype=float),
            ground_truth=g,
            support=support,
            seed=doc.get("seed"),
            meta={"ground_truth_value": doc.get("ground_truth_value", 1.0)},
        )

    def save(self, path: str | Path) -> None:
        Path(path).write_text(self.to_json())

    @classmethod
    def load(cls, path: str | Path) -> "Dataset":
        return cls.from_json(Path(path).read_text())


@dataclass(frozen=True)
class DatasetStats:
    """Data-niceness quantities controlling the noise/gradient balance."""

    max_abs_entry: float          # max_i ||x_i||_inf
    min_second_moment: float      # min_k (1/n) sum_i x_ik^2
    max_cross_correlation: float  # max_{j != k} |(1/n) sum_i x_ij x_ik|


def generate_dataset(
    d: int,
    n: int,
    r: int,
    seed: int,
    support: str = "first",
    ground_truth_value: float = 1.0,
) -> Dataset:
    """Sample n standard-Gaussian rows and label them with an r-sparse target.

    `support="first"` puts the nonzero entries on coordinates 0..r-1 (the
    reproducible default); `support="random"` draws them under the same seed.
    """
    if d <= 0 or n < 1 or not (0 <= r <= d):
        raise ValueError(f"invalid dimensions: d={d}, n={n}, r={r}")
    rng = np.random.Generator(np.random.Philox(key=seed))
    x = rng.standard_normal((n, d))
    if support == "first":
        supp = np.arange(r)
    elif support == "random":
        supp = np.sort(rng.choice(d, size=r, replace=False))
    else:
        raise ValueError(f"unknown support mode: {support!r}")
    g = np.zeros(d)
    g[supp] = ground_truth_value
    y = x @ (g * g)
    ds = Dataset(
        x=x, y=y, ground_truth=g, support=supp, seed=seed,
        meta={"support_mode": support, "ground_truth_value": ground_truth_value},
    )
    x.setflags(write=False)
    y.setflags(write=False)
    g.setflags(write=False)
    return ds


def uniform_init(d: int, scale: float = 1.0) -> np.ndarray:
    """All-entries-equal starting point."""
    return np.full(d, float(scale))


def predict(v: np.ndarray, x: np.ndarray) -> float:
    """f_v(x) = sum_k v_k^2 x_k."""
    v = np.asarray(v)
    x = np.asarray(x)
    if v.shape != x.shape:
        raise ValueError(f"dimension mismatch: {v.shape} vs {x.shape}")
    return float((v * v) @ x)


def example_loss(v: np.ndarray, ds: Dataset, i: int) -> float:
    """Quarter squared residual on example i."""
    if not 0 <= i < ds.n:
        raise IndexError(f"example index {i} out of range [0, {ds.n})")
    return 0.25 * (predict(v, ds.x[i]) - ds.y[i]) ** 2


def example_grad(v: np.ndarray, ds: Dataset, i: int) -> np.ndarray:
    """Gradient of example_loss: (f_v(x_i) - y_i) * x_i * v."""
    if not 0 <= i < ds.n:
        raise IndexError(f"example index {i} out of range [0, {ds.n})")
    v = np.asarray(v)
    resid = (v * v) @ ds.x[i] - ds.y[i]
    return resid * ds.x[i] * v


def full_loss(v: np.ndarray, ds: Dataset) -> float:
    """Mean of the per-example losses."""
    if ds.n == 0:
        raise ValueError("empty dataset")
    v = np.asarray(v)
    resid = ds.x @ (v * v) - ds.y
    return 0.25 * float(np.mean(resid * resid))


def full_grad(v: np.ndarray, ds: Dataset) -> np.ndarray:
    """Mean of the per-example gradients."""
    if ds.n == 0:
        raise ValueError("empty dataset")
    v = np.asarray(v)
    resid = ds.x @ (v * v) - ds.y
    return ((ds.x.T @ resid) / ds.n) * v


def test_error(v: np.ndarray, ground_truth: np.ndarray) -> float:
    """Squared l2 distance between the squared parameter vectors.

    Equals the population risk for fresh standard-Gaussian inputs.
    """
    v = np.asarray(v)
    g = np.asarray(ground_truth)
    if v.shape != g.shape:
        raise ValueError(f"dimension mismatch: {v.shape} vs {g.shape}")
    diff = v * v - g * g
    return float(diff @ diff)


def dataset_stats(ds: Dataset) -> DatasetStats:
    """Empirical data-niceness statistics.

    These are sample averages over the n drawn rows; informal arguments often
    use the population values (second moments 1, cross-correlations 0), which
    the empirical quantities approach as n grows.
    """
    second_moments = np.mean(ds.x * ds.x, axis=0)
    gram = (ds.x.T @ ds.x) / ds.n
    np.fill_diagonal(gram, 0.0)
    return DatasetStats(
        max_abs_entry=float(np.abs(ds.x).max()),
        min_second_moment=float(second_moments.min()),
        max_cross_correlation=float(np.abs(gram).max()) if ds.d > 1 else 0.0,
    )

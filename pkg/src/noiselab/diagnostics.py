"""Concave potentials and phase-verdict predicates evaluated on iterates.

The square-root-sum potential witnesses the contraction that multiplicative
(parameter-dependent) noise exerts on nonnegative iterates; the bounded
variants gate it on norm constraints so it is only counted inside the region
where the contraction argument applies.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

POTENTIAL_KINDS = ("sqrt_sum", "bounded_sqrt_sum", "support_bounded_sqrt_sum")


@dataclass(frozen=True)
class PotentialSpec:
    kind: str = "sqrt_sum"
    bound: float | None = None          # l1 gate (bounded) / support sup-norm gate
    epsilon: float | None = None        # off-support l1 gate
    support: np.ndarray | None = None

    def __post_init__(self):
        if self.kind not in POTENTIAL_KINDS:
            raise ValueError(f"unknown potential kind {self.kind!r}")
        if self.kind == "bounded_sqrt_sum":
            if self.bound is None or self.bound <= 0:
                raise ValueError("bounded_sqrt_sum needs bound > 0")
        if self.kind == "support_bounded_sqrt_sum":
            if self.bound is None or self.bound <= 0:
                raise ValueError("support_bounded_sqrt_sum needs bound > 0")
            if self.epsilon is None or self.epsilon <= 0:
                raise ValueError("support_bounded_sqrt_sum needs epsilon > 0")
            if self.support is None:
                raise ValueError("support_bounded_sqrt_sum needs the support index set")


def potential(v: np.ndarray, spec: PotentialSpec = PotentialSpec()) -> float:
    """Evaluate the chosen potential; rejects negative entries.

    sqrt_sum:                  sum_k sqrt(v_k)
    bounded_sqrt_sum:          same if ||v||_1 <= bound, else 0
    support_bounded_sqrt_sum:  sum over off-support sqrt(v_k) if the
                               off-support l1 norm is <= epsilon and the
                               support sup-norm is <= bound, else 0
    """
    v = np.asarray(v, dtype=float)
    if v.min() < 0:
        raise ValueError("potential is defined on elementwise-nonnegative vectors")
    if spec.kind == "sqrt_sum":
        return float(np.sqrt(v).sum())
    if spec.kind == "bounded_sqrt_sum":
        if v.sum() > spec.bound:
            return 0.0
        return float(np.sqrt(v).sum())
    # support_bounded_sqrt_sum
    mask = np.ones(v.shape[0], dtype=bool)
    mask[spec.support] = False
    off = v[mask]
    if off.sum() > spec.epsilon or (len(spec.support) and v[spec.support].max() > spec.bound):
        return 0.0
    return float(np.sqrt(off).sum())


@dataclass(frozen=True)
class Stage0Verdict:
    passed: bool
    linf: float
    min_entry: float
    min_entry_floor: float


def stage0_verdict(v: np.ndarray, d: int, eta_delta: float, c: float = 25.0) -> Stage0Verdict:
    """Did the shrink-everything phase land where it should?

    Passes iff ||v||_inf <= 1/d and min_k v_k >= exp(-c / eta_delta). The
    floor constant c is configurable; the default was calibrated so runs that
    go on to recover the ground truth pass (its role is "no entry got stuck
    at zero", the exact constant is a knob).
    """
    v = np.asarray(v, dtype=float)
    linf = float(np.abs(v).max())
    min_entry = float(v.min())
    floor = math.exp(-c / eta_delta)
    return Stage0Verdict(
        passed=(linf <= 1.0 / d) and (min_entry >= floor),
        linf=linf,
        min_entry=min_entry,
        min_entry_floor=floor,
    )


@dataclass(frozen=True)
class Stage1Verdict:
    passed: bool
    linf_on_support: float
    l1_off_support: float


def stage1_verdict(
    v: np.ndarray,
    support: np.ndarray,
    eps1: float,
    ground_truth_value: float = 1.0,
    support_tol: float = 0.1,
) -> Stage1Verdict:
    """Support entries within support_tol of their target, off-support l1 <= eps1."""
    v = np.asarray(v, dtype=float)
    mask = np.ones(v.shape[0], dtype=bool)
    mask[support] = False
    linf_s = float(np.abs(v[support] - ground_truth_value).max()) if len(support) else 0.0
    l1_sbar = float(np.abs(v[mask]).sum())
    return Stage1Verdict(
        passed=(linf_s <= support_tol) and (l1_sbar <= eps1),
        linf_on_support=linf_s,
        l1_off_support=l1_sbar,
    )


def contraction_estimate(iterates: Sequence[np.ndarray], spec: PotentialSpec = PotentialSpec()) -> float:
    """Mean one-step potential ratio over a slice of consecutive iterates.

    Only steps with a strictly positive current potential are counted; needs
    at least 10 usable pairs. Values below 1 witness contraction.
    """
    vals = [potential(v, spec) for v in iterates]
    ratios = [b / a for a, b in zip(vals[:-1], vals[1:]) if a > 0]
    if len(ratios) < 10:
        raise ValueError(f"need >= 10 consecutive pairs with positive potential, got {len(ratios)}")
    return float(np.mean(ratios))


def norm_bound_check(records: Sequence, init_scale: float, d: int, rho: float) -> bool:
    """Is the l2 norm below 6*init_scale*d/rho at every logged step?

    Accepts trajectory records (reads .l2) or raw iterates. NaN/inf norms
    (diverged runs) fail the check.
    """
    b0 = 6.0 * init_scale * d / rho
    for item in records:
        l2 = item.l2 if hasattr(item, "l2") else float(np.linalg.norm(item))
        if not (l2 <= b0):
            return False
    return True

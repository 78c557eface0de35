"""Shared helpers: finite-difference oracles and scripted rng stand-ins."""

from __future__ import annotations

import numpy as np
import pytest

from noiselab.model import example_loss, full_loss


class FakeRng:
    """Generator stand-in that replays queued draws, for hand-computed cases."""

    def __init__(self, integers=(), normals=()):
        self._integers = list(integers)
        self._normals = list(normals)

    def integers(self, low, high=None):
        return self._integers.pop(0)

    def standard_normal(self, size=None):
        return np.asarray(self._normals.pop(0), dtype=float)


def central_diff_grad(f, v, h=1e-5):
    """Central finite differences of a scalar function of a vector."""
    v = np.asarray(v, dtype=float)
    g = np.empty_like(v)
    for k in range(len(v)):
        vp, vm = v.copy(), v.copy()
        vp[k] += h
        vm[k] -= h
        g[k] = (f(vp) - f(vm)) / (2 * h)
    return g


def example_loss_fd_grad(v, ds, i, h=1e-5):
    return central_diff_grad(lambda w: example_loss(w, ds, i), v, h)


def full_loss_fd_grad(v, ds, h=1e-5):
    return central_diff_grad(lambda w: full_loss(w, ds), v, h)


def rel_err(a, b):
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    denom = max(np.abs(a).max(), np.abs(b).max(), 1e-30)
    return np.abs(a - b).max() / denom


@pytest.fixture
def rng():
    return np.random.Generator(np.random.Philox(key=123))

"""The one-dimensional warm-up: state-scaled noise collapses, additive noise spreads.

Both walks are mean-preserving martingales started at v=1. The multiplicative
walk's sqrt is a supermartingale shrinking by the exact factor
(sqrt(1+eta) + sqrt(1-eta))/2 per step, so almost every path ends up pinned
at zero; the additive walk's variance just grows linearly.
"""

import numpy as np

from noiselab import WalkConfig, multiplicative_sqrt_decay_factor, run_walk, walk_ensemble_stats


def main():
    eta = 0.5
    cfg = WalkConfig(kind="multiplicative", eta=eta, steps=200, seed=0)
    stats = walk_ensemble_stats(cfg, trials=10_000)
    factor = multiplicative_sqrt_decay_factor(eta)
    print(f"multiplicative walk, eta={eta}: per-step sqrt factor {factor:.6f}")
    print(f"{'step':>6} {'mean v':>10} {'mean sqrt(v)':>13} {'predicted':>11} {'frac < 1e-3':>12}")
    for k, t in enumerate(stats.checkpoints):
        print(f"{t:>6} {stats.mean_v[k]:>10.4f} {stats.mean_sqrt_v[k]:>13.6f} "
              f"{factor ** t:>11.6f} {stats.frac_below[1e-3][k]:>12.4f}")

    add = walk_ensemble_stats(WalkConfig(kind="additive", eta=1.0, steps=100_000, seed=0),
                              trials=2000, checkpoints=np.array([100, 10_000, 100_000]))
    print("\nadditive walk, eta=1: variance grows like t")
    for k, t in enumerate(add.checkpoints):
        var = (add.stderr_v[k] * np.sqrt(2000)) ** 2
        print(f"  t={t:>7}: mean v = {add.mean_v[k]:.3f}, sample variance = {var:.0f} (t = {t})")

    # a single forced path for flavor
    traj = run_walk(WalkConfig(kind="multiplicative", eta=eta, steps=6),
                    signs=np.array([1, 1, -1, 1, -1, -1.0]))
    path = " -> ".join(f"{v:.3f}" for _, v, _ in traj)
    print(f"\none forced path (+ + - + - -): {path}")


if __name__ == "__main__":
    main()

"""The shrink-everything phase in isolation.

With the noise level far above the residual scale and eta = c0/delta, every
coordinate of the iterate contracts multiplicatively: the sqrt-sum potential
decays geometrically while plain descent at the same learning rate barely
moves it. This is the regime the stage-0 verdict certifies.
"""

import numpy as np

from noiselab import (
    NoiseSpec,
    contraction_estimate,
    generate_dataset,
    run_trajectory,
    stage0_preset,
    stage0_verdict,
    uniform_init,
)


def main():
    preset = stage0_preset()
    print(f"preset: delta={preset.delta:g}, eta={preset.eta:g}, {preset.steps} steps")
    ds = generate_dataset(d=preset.d, n=preset.n, r=preset.r, seed=0)
    v0 = uniform_init(preset.d, preset.init_scale)
    sched = preset.schedule()

    lab = run_trajectory(ds, v0, preset.engine(), sched, log_every=preset.steps // 8,
                         seed=1000, iterate_log_every=1)
    gd = run_trajectory(ds, v0, NoiseSpec(kind="gd"), sched, log_every=preset.steps // 8,
                        seed=1000, iterate_log_every=1)

    print(f"\n{'step':>6} {'label |v|inf':>13} {'label potential':>16} {'gd potential':>13}")
    for rl, rg in zip(lab.records, gd.records):
        print(f"{rl.step:>6} {rl.linf:>13.4e} {rl.potential:>16.4f} {rg.potential:>13.4f}")

    print(f"\nmean one-step potential ratio: label {contraction_estimate(lab.iterates):.6f}"
          f" vs gd {contraction_estimate(gd.iterates):.6f}")
    verdict = stage0_verdict(lab.final_v, preset.d, preset.eta * preset.delta)
    print(f"stage-0 verdict: passed={verdict.passed} "
          f"(sup norm {verdict.linf:.2e} <= 1/d = {1 / preset.d}, "
          f"min entry {verdict.min_entry:.2e} >= floor {verdict.min_entry_floor:.2e})")


if __name__ == "__main__":
    main()

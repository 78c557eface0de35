"""Side-by-side engines on the 100-dimensional benchmark, shortened horizon.

Noise-free descent interpolates the training set almost immediately and keeps
a large test error; label noise keeps kicking the iterate until the sparse
solution wins; spherical Gaussian noise wanders off. This is the small/fast
cousin of the full `noiselab figure1` grid (which uses the 3e5-step horizon
and the 4x-longer Gaussian runs).
"""

import numpy as np

from noiselab import NoiseSpec, ScheduleSpec, generate_dataset, run_trajectory, uniform_init

STEPS = 60_000
SEED = 0


def main():
    ds = generate_dataset(d=100, n=40, r=5, seed=SEED)
    v0 = uniform_init(100, 1.0)
    # label noise keeps the benchmark decay profile, compressed to the horizon
    label_plan = ScheduleSpec(stages=((0.01, STEPS - 2 * STEPS // 5),
                                      (0.001, STEPS // 5), (1e-4, STEPS // 5)))
    runs = [
        ("gd", NoiseSpec(kind="gd"), ScheduleSpec.constant(0.01, STEPS)),
        ("label noise", NoiseSpec(kind="label_noise", delta=1.0), label_plan),
        ("minibatch sim", NoiseSpec(kind="minibatch_sim", delta=1.0),
         ScheduleSpec.constant(0.01, STEPS)),
        ("gaussian s=0.5", NoiseSpec(kind="gaussian", sigma=0.5),
         ScheduleSpec.constant(0.01, STEPS)),
    ]
    print(f"{'engine':<16} {'train loss':>12} {'test error':>12} {'sup-norm err':>13}  note")
    for name, spec, sched in runs:
        res = run_trajectory(ds, v0, spec, sched, log_every=STEPS, seed=4242)
        rec = res.final
        err = (np.abs(res.final_v - ds.ground_truth).max()
               if np.isfinite(res.final_v).all() else float("inf"))
        note = f"diverged at step {res.diverged_step}" if res.diverged else ""
        print(f"{name:<16} {rec.train_loss:>12.3e} {rec.test_error:>12.3e} {err:>13.3e}  {note}")
    print("\n(for the full benchmark with seeds and plots: "
          "`noiselab figure1 --seeds 0..4 --out runs/` then "
          "`noiselab-plot --run-dir runs --panel test --out test.png`)")


if __name__ == "__main__":
    main()

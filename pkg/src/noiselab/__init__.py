"""Simulation lab for noise-shape implicit bias in quadratically-parameterized regression."""

__version__ = "0.1.0"

from .diagnostics import (
    PotentialSpec,
    Stage0Verdict,
    Stage1Verdict,
    contraction_estimate,
    norm_bound_check,
    potential,
    stage0_verdict,
    stage1_verdict,
)
from .engines import (
    NoiseSpec,
    StepContext,
    is_diverged,
    sigma_from_lambda,
    step,
    step_gaussian,
    step_gd,
    step_label_noise,
    step_minibatch_sim,
    step_plain_sgd,
)
from .gibbs import (
    ConeProbeReport,
    StatDimEstimate,
    cone_constant,
    find_positive_direction,
    intersection_probability_mc,
    orthocomplement_basis,
    orthonormal_completion,
    partition_divergence_probe,
    statistical_dimension_mc,
)
from .model import (
    Dataset,
    DatasetStats,
    dataset_stats,
    example_grad,
    example_loss,
    full_grad,
    full_loss,
    generate_dataset,
    predict,
    test_error,
    uniform_init,
)
from .presets import comparison_preset, recovery_schedule, stage0_preset
from .runs import RunJob, read_trajectory_csv, run_grid, run_job, summarize_runs, write_trajectory_csv
from .trainer import (
    ScheduleSpec,
    TrajectoryRecord,
    TrajectoryResult,
    run_trajectory,
    three_stage_schedule,
)
from .walks import WalkConfig, multiplicative_sqrt_decay_factor, run_walk, walk_ensemble_stats

"""Panel regeneration against synthetic run directories obeying the CSV contract."""

import csv
import hashlib
import math
from pathlib import Path

import numpy as np
import pytest

from plotscripts.render import PlotSpec, engine_curve, main, read_series, render_figure

HEADER = ["step", "train_loss", "test_error", "linf", "l1", "l2",
          "linf_err_S", "l1_Sbar", "potential", "min_entry", "diverged"]


def write_cell(run_dir: Path, engine: str, seed: int, steps, train, test):
    cell = run_dir / engine / str(seed)
    cell.mkdir(parents=True)
    with open(cell / "trajectory.csv", "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(HEADER)
        for s, tr, te in zip(steps, train, test):
            w.writerow([s, repr(tr), repr(te), "1.0", "1.0", "1.0",
                        "0.1", "0.1", "1.0", "0.01", 0])
    (cell / "manifest.json").write_text("{}")


def synth_value(engine: str, seed: int, step: int, col: str) -> float:
    base = {"train_loss": 1.0, "test_error": 10.0}[col]
    return base * math.exp(-step / 5e4) + 1e-6 * (seed + 1) + 0.01 * (hash(engine) % 7)


def make_run_dir(tmp_path: Path, engines, seeds, steps_by_engine) -> Path:
    run = tmp_path / "runs"
    for engine in engines:
        for seed in seeds:
            steps = steps_by_engine[engine]
            train = [synth_value(engine, seed, s, "train_loss") for s in steps]
            test = [synth_value(engine, seed, s, "test_error") for s in steps]
            write_cell(run, engine, seed, steps, train, test)
    return run


BENCH_ENGINES = ["gd", "label_noise", "minibatch_sim",
                 "gaussian_s0.1", "gaussian_s0.5", "gaussian_s1", "gaussian_s2"]


def bench_steps():
    base = list(range(0, 300_001, 50_000))
    long = list(range(0, 1_200_001, 200_000))
    return {e: (long if e.startswith("gaussian") else base) for e in BENCH_ENGINES}


@pytest.fixture
def bench_dir(tmp_path):
    return make_run_dir(tmp_path, BENCH_ENGINES, seeds=[0, 1, 2, 3, 4],
                        steps_by_engine=bench_steps())


def dir_fingerprint(path: Path) -> str:
    h = hashlib.sha256()
    for p in sorted(path.rglob("*")):
        h.update(str(p.relative_to(path)).encode())
        if p.is_file():
            h.update(p.read_bytes())
    return h.hexdigest()


# ------------------------------------------------------------------ acceptance

def test_renders_both_panels_from_complete_run(bench_dir, tmp_path):
    for panel in ("train", "test"):
        out = tmp_path / f"{panel}.png"
        fig, curves = render_figure(PlotSpec(run_dir=bench_dir, panel=panel, out=out))
        assert out.exists() and out.stat().st_size > 5_000
        assert set(curves) == set(BENCH_ENGINES)
        # one plotted line per engine, in the axes
        ax = fig.axes[0]
        assert len(ax.lines) == len(BENCH_ENGINES)


def test_plotted_values_equal_csv_values_exactly(tmp_path):
    # single-seed directory: the median curve IS the csv column
    engines = ["gd", "label_noise", "gaussian_s0.5"]
    run = make_run_dir(tmp_path, engines, seeds=[3],
                       steps_by_engine={e: list(range(0, 100_001, 10_000)) for e in engines})
    out = tmp_path / "test.png"
    fig, curves = render_figure(PlotSpec(run_dir=run, panel="test", out=out))
    ax = fig.axes[0]
    lines = {line.get_label(): line for line in ax.lines}
    rng = np.random.Generator(np.random.Philox(key=1))
    for _ in range(5):
        engine = engines[rng.integers(0, len(engines))]
        steps, vals = read_series(run / engine / "3" / "trajectory.csv", "test_error")
        k = int(rng.integers(0, len(steps)))
        ydata = lines[engine].get_ydata()
        assert ydata[k] == vals[k]          # exact float equality


def test_median_across_seeds_is_exact_middle_value(tmp_path):
    run = make_run_dir(tmp_path, ["gd"], seeds=[0, 1, 2],
                       steps_by_engine={"gd": [0, 10, 20]})
    curve = engine_curve(run, "gd", "test_error")
    for k, step in enumerate([0, 10, 20]):
        vals = sorted(synth_value("gd", s, step, "test_error") for s in range(3))
        assert curve.median[k] == vals[1]


def test_gaussian_axis_rescale_on_long_run(bench_dir, tmp_path):
    fig, curves = render_figure(PlotSpec(run_dir=bench_dir, panel="train",
                                         out=tmp_path / "p.png"))
    gauss = curves["gaussian_s0.5"]
    steps, _ = read_series(bench_dir / "gaussian_s0.5" / "0" / "trajectory.csv", "train_loss")
    assert steps.max() == 1_200_000
    assert np.array_equal(gauss.x, steps / 4.0)
    assert gauss.x.max() == 300_000.0       # shares the base iteration range
    base = curves["gd"]
    assert base.x.max() == 300_000.0


def test_rendering_is_read_only(bench_dir, tmp_path):
    before = dir_fingerprint(bench_dir)
    render_figure(PlotSpec(run_dir=bench_dir, panel="test", out=tmp_path / "x.png"))
    assert dir_fingerprint(bench_dir) == before


# ----------------------------------------------------------------- edge cases

def test_single_engine_panel(tmp_path):
    run = make_run_dir(tmp_path, ["label_noise"], seeds=[0],
                       steps_by_engine={"label_noise": [0, 5, 10]})
    fig, curves = render_figure(PlotSpec(run_dir=run, panel="train",
                                         out=tmp_path / "one.png"))
    assert list(curves) == ["label_noise"]
    assert len(fig.axes[0].lines) == 1


def test_unequal_lengths_align_on_union(tmp_path):
    # one seed halted early (divergence): it contributes only where it logged
    run = tmp_path / "runs"
    write_cell(run, "gd", 0, [0, 10, 20], [1.0, 0.5, 0.25], [9.0, 8.0, 7.0])
    write_cell(run, "gd", 1, [0, 10], [2.0, 1.0], [10.0, 9.0])
    curve = engine_curve(run, "gd", "test_error")
    assert list(curve.x) == [0.0, 10.0, 20.0]
    assert curve.median[0] == 9.5           # both seeds
    assert curve.median[2] == 7.0           # only the surviving seed


def test_missing_column_rejected(tmp_path):
    run = tmp_path / "runs"
    cell = run / "gd" / "0"
    cell.mkdir(parents=True)
    (cell / "trajectory.csv").write_text("step,loss\n0,1.0\n")
    with pytest.raises(ValueError):
        engine_curve(run, "gd", "test_error")


def test_empty_run_dir_rejected(tmp_path):
    (tmp_path / "runs").mkdir()
    with pytest.raises(ValueError):
        render_figure(PlotSpec(run_dir=tmp_path / "runs", panel="test",
                               out=tmp_path / "y.png"))


def test_bad_panel_rejected(tmp_path):
    with pytest.raises(ValueError):
        PlotSpec(run_dir=tmp_path, panel="validation", out=tmp_path / "z.png")


# ------------------------------------------------------------------------ CLI

def test_cli_renders(bench_dir, tmp_path, capsys):
    out = tmp_path / "cli.png"
    assert main(["--run-dir", str(bench_dir), "--panel", "test", "--out", str(out)]) == 0
    assert out.exists()


def test_cli_engine_subset(bench_dir, tmp_path):
    out = tmp_path / "subset.png"
    code = main(["--run-dir", str(bench_dir), "--panel", "train", "--out", str(out),
                 "--engines", "gd,label_noise"])
    assert code == 0


def test_cli_error_exit(tmp_path, capsys):
    (tmp_path / "empty").mkdir()
    assert main(["--run-dir", str(tmp_path / "empty"), "--panel", "test",
                 "--out", str(tmp_path / "no.png")]) == 1
    assert "error" in capsys.readouterr().err

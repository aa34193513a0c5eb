from pathlib import Path

import pytest

from levelwalk_plots.cli import main

FIXTURES = Path(__file__).parent / "fixtures"
PNG_MAGIC = b"\x89PNG"


def run(kind, inputs, out):
    args = [kind]
    for pattern in inputs:
        args += ["--in", str(pattern)]
    args += ["--out", str(out)]
    return main(args)


@pytest.mark.parametrize("kind,inputs", [
    ("curves", ["trace_run*.csv"]),
    ("toy-path", ["path.csv"]),
    ("pca-3d", ["projections.csv"]),
    ("loss-surface", ["loss_grid.csv", "projections.csv"]),
    ("cost-compare", ["cost.csv"]),
])
def test_renders_every_figure_kind(tmp_path, kind, inputs):
    out = tmp_path / f"{kind}.png"
    assert run(kind, [FIXTURES / p for p in inputs], out) == 0
    assert out.read_bytes()[:4] == PNG_MAGIC


def test_curves_single_run(tmp_path):
    out = tmp_path / "one.png"
    assert run("curves", [FIXTURES / "trace_run0.csv"], out) == 0
    assert out.read_bytes()[:4] == PNG_MAGIC


def test_schema_mismatch_exits_2(tmp_path, capsys):
    bad = tmp_path / "bad.csv"
    bad.write_text("predictor_index,oops\n0,1\n")
    assert run("curves", [bad], tmp_path / "x.png") == 2
    assert "train_loss" in capsys.readouterr().err


def test_missing_input_exits_2(tmp_path):
    assert run("curves", [tmp_path / "nope*.csv"], tmp_path / "x.png") == 2


def test_loss_surface_without_grid_exits_2(tmp_path, capsys):
    assert run("loss-surface", [FIXTURES / "projections.csv"],
               tmp_path / "x.png") == 2

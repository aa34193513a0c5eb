"""Readers for the levelwalk CSV file formats.

These parse the documented on-disk schemas only; nothing here imports the
experiment code. Every reader validates the header and raises SchemaError
naming the offending column on mismatch.
"""

import re
from pathlib import Path

import numpy as np

TRACE_COLUMNS = ("predictor_index", "train_loss", "test_loss", "test_metric",
                 "sq_norm", "angle_deg", "lr_predictor", "lr_corrector",
                 "corrector_steps", "cum_grad_evals")
PATH_COLUMNS = ("x", "y")
COST_COLUMNS = ("method", "source", "cum_grad_evals", "best_test_metric")


class SchemaError(ValueError):
    pass


def _check_header(path, found, expected):
    found = tuple(found)
    if found == tuple(expected):
        return
    for got, want in zip(found, expected):
        if got != want:
            raise SchemaError(f"{path}: expected column {want!r}, found {got!r}")
    raise SchemaError(f"{path}: expected {len(expected)} columns, "
                      f"found {len(found)}")


def _read_csv(path, expected_columns):
    lines = Path(path).read_text().splitlines()
    if not lines:
        raise SchemaError(f"{path}: empty file")
    _check_header(path, lines[0].split(","), expected_columns)
    rows = [line.split(",") for line in lines[1:] if line]
    return rows


def read_trace(path):
    """One traversal trace -> dict of column name to float array."""
    rows = _read_csv(path, TRACE_COLUMNS)
    data = np.array(rows, dtype=np.float64)
    if data.ndim != 2 or data.shape[1] != len(TRACE_COLUMNS):
        raise SchemaError(f"{path}: ragged rows")
    return {name: data[:, i] for i, name in enumerate(TRACE_COLUMNS)}


def read_path(path):
    """Toy traversal path -> (x, y) arrays."""
    rows = _read_csv(path, PATH_COLUMNS)
    data = np.array(rows, dtype=np.float64)
    return data[:, 0], data[:, 1]


def read_projections(path):
    """PCA trajectory projections -> (component names, {run: (index, coords)}).

    coords has shape (points, k) with columns ordered c1..ck.
    """
    lines = Path(path).read_text().splitlines()
    if not lines:
        raise SchemaError(f"{path}: empty file")
    header = lines[0].split(",")
    _check_header(path, header[:2], ("run", "predictor_index"))
    comps = header[2:]
    for i, name in enumerate(comps):
        if name != f"c{i + 1}":
            raise SchemaError(f"{path}: expected column 'c{i + 1}', "
                              f"found {name!r}")
    if not comps:
        raise SchemaError(f"{path}: no component columns")
    runs = {}
    for line in lines[1:]:
        if not line:
            continue
        f = line.split(",")
        runs.setdefault(f[0], []).append([float(v) for v in f[1:]])
    out = {}
    for run, rows in runs.items():
        arr = np.array(rows)
        out[run] = (arr[:, 0].astype(int), arr[:, 1:])
    return comps, out


_GRID_META = re.compile(
    r"#\s*c1_range=\[([^,]+),([^\]]+)\]\s+c2_range=\[([^,]+),([^\]]+)\]"
    r"\s+resolution=(\d+)")


def read_loss_grid(path):
    """Loss-surface grid -> (c1 axis, c2 axis, values (res, res))."""
    lines = Path(path).read_text().splitlines()
    if not lines or not lines[0].startswith("#"):
        raise SchemaError(f"{path}: missing grid metadata comment")
    meta = _GRID_META.match(lines[0])
    if not meta:
        raise SchemaError(f"{path}: unparseable grid metadata")
    resolution = int(meta.group(5))
    _check_header(path, lines[1].split(","), ("c1", "c2", "train_loss"))
    data = np.array([line.split(",") for line in lines[2:] if line],
                    dtype=np.float64)
    if data.shape[0] != resolution * resolution:
        raise SchemaError(f"{path}: expected {resolution * resolution} grid "
                          f"rows, found {data.shape[0]}")
    c1 = np.unique(data[:, 0])
    c2 = np.unique(data[:, 1])
    values = data[:, 2].reshape(resolution, resolution)
    return c1, c2, values


def read_cost(path):
    """Cost-comparison table -> list of (method, source, evals, metric)."""
    rows = _read_csv(path, COST_COLUMNS)
    return [(m, s, int(e), float(v)) for m, s, e, v in rows]


def classify(path):
    """Identify which schema a CSV file follows from its header."""
    text = Path(path).read_text()
    first = text.splitlines()[0] if text else ""
    if first.startswith("#"):
        return "loss-grid"
    cols = tuple(first.split(","))
    if cols == TRACE_COLUMNS:
        return "trace"
    if cols == PATH_COLUMNS:
        return "path"
    if cols == COST_COLUMNS:
        return "cost"
    if cols[:2] == ("run", "predictor_index"):
        return "projections"
    raise SchemaError(f"{path}: unrecognized header {first!r}")

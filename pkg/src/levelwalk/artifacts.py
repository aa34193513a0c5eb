"""On-disk artifact formats: length-prefixed float64 vectors, trace CSVs,
sweep CSVs, PCA model files, loss-grid CSVs, and run manifests.

All numeric CSV output uses 17 significant digits so files are exact
round-trip records of the float64 values that produced them.
"""

import json
import struct
from pathlib import Path

import numpy as np

from .traversal import TRACE_HEADER, TraceRecord

SWEEP_HEADER = "lambda,run,seed,test_metric,final_sq_norm,failed"


def fmt(v) -> str:
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return f"{float(v):.17g}"


def save_theta(path, theta):
    """Little-endian: 8-byte uint64 length prefix, then float64 values."""
    theta = np.asarray(theta, dtype=np.float64)
    with open(path, "wb") as f:
        f.write(struct.pack("<Q", theta.size))
        f.write(theta.astype("<f8").tobytes())


def load_theta(path) -> np.ndarray:
    with open(path, "rb") as f:
        n, = struct.unpack("<Q", f.read(8))
        data = np.frombuffer(f.read(8 * n), dtype="<f8")
    if data.size != n:
        raise IOError(f"{path}: truncated vector file")
    return data.astype(np.float64)


def save_theta_sidecar(path, spec, seed):
    lines = [
        "layer_sizes: " + ",".join(str(s) for s in spec.layer_sizes),
        f"head: {spec.head}",
        f"seed: {seed}",
    ]
    Path(path).write_text("\n".join(lines) + "\n")


def save_snapshots(path, snapshots):
    """Consecutive length-prefixed vectors in one file."""
    with open(path, "wb") as f:
        for theta in snapshots:
            theta = np.asarray(theta, dtype=np.float64)
            f.write(struct.pack("<Q", theta.size))
            f.write(theta.astype("<f8").tobytes())


def load_snapshots(path):
    out = []
    raw = Path(path).read_bytes()
    off = 0
    while off < len(raw):
        n, = struct.unpack("<Q", raw[off:off + 8])
        off += 8
        vec = np.frombuffer(raw, dtype="<f8", count=n, offset=off)
        off += 8 * n
        out.append(vec.astype(np.float64))
    return out


def write_trace_csv(path, trace):
    rows = [TRACE_HEADER]
    for r in trace:
        rows.append(",".join([
            str(r.predictor_index), fmt(r.train_loss), fmt(r.test_loss),
            fmt(r.test_metric), fmt(r.sq_norm), fmt(r.angle_deg),
            fmt(r.lr_predictor), fmt(r.lr_corrector),
            str(r.corrector_steps), str(r.cum_grad_evals),
        ]))
    Path(path).write_text("\n".join(rows) + "\n")


def read_trace_csv(path):
    lines = Path(path).read_text().splitlines()
    if not lines or lines[0] != TRACE_HEADER:
        raise IOError(f"{path}: unexpected trace header")
    trace = []
    for line in lines[1:]:
        f = line.split(",")
        trace.append(TraceRecord(
            predictor_index=int(f[0]), train_loss=float(f[1]),
            test_loss=float(f[2]), test_metric=float(f[3]), sq_norm=float(f[4]),
            angle_deg=float(f[5]), lr_predictor=float(f[6]),
            lr_corrector=float(f[7]), corrector_steps=int(f[8]),
            cum_grad_evals=int(f[9])))
    return trace


def write_path_csv(path, points):
    rows = ["x,y"] + [f"{fmt(x)},{fmt(y)}" for x, y in points]
    Path(path).write_text("\n".join(rows) + "\n")


def write_sweep_csv(path, runs):
    rows = [SWEEP_HEADER]
    for r in runs:
        rows.append(",".join([fmt(r.lam), str(r.run), str(r.seed),
                              fmt(r.test_metric), fmt(r.final_sq_norm),
                              str(int(r.failed))]))
    Path(path).write_text("\n".join(rows) + "\n")


def save_pca(directory, model):
    """PCA model as vector files (mean + one per component) plus a text
    sidecar with the explained-variance ratios."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    save_theta(directory / "mean.bin", model.mean)
    for i, comp in enumerate(model.components):
        save_theta(directory / f"component_{i:02d}.bin", comp)
    ratios = " ".join(fmt(r) for r in model.explained_variance_ratio)
    (directory / "explained_variance_ratio.txt").write_text(ratios + "\n")


def load_pca(directory):
    from .analysis import PcaModel
    directory = Path(directory)
    mean = load_theta(directory / "mean.bin")
    comps = []
    for p in sorted(directory.glob("component_*.bin")):
        comps.append(load_theta(p))
    ratios = np.array([float(v) for v in
                       (directory / "explained_variance_ratio.txt").read_text().split()])
    return PcaModel(mean=mean, components=np.array(comps),
                    explained_variance_ratio=ratios)


def write_loss_grid_csv(path, grid):
    """c1,c2,train_loss rows; the header comment records ranges, resolution,
    and the explained-variance ratios."""
    evr = " ".join(fmt(r) for r in grid.explained_variance_ratio)
    rows = [
        f"# c1_range=[{fmt(grid.c1[0])},{fmt(grid.c1[-1])}] "
        f"c2_range=[{fmt(grid.c2[0])},{fmt(grid.c2[-1])}] "
        f"resolution={len(grid.c1)} explained_variance_ratio={evr}",
        "c1,c2,train_loss",
    ]
    for i, u in enumerate(grid.c1):
        for j, v in enumerate(grid.c2):
            rows.append(f"{fmt(u)},{fmt(v)},{fmt(grid.values[i, j])}")
    Path(path).write_text("\n".join(rows) + "\n")


def write_manifest(path, manifest):
    Path(path).write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n")


def read_manifest(path):
    return json.loads(Path(path).read_text())

"""The five figure kinds, each a function from input files to an image."""

import matplotlib
matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np
from matplotlib.colors import LogNorm

from . import schemas
from .aggregate import PANEL_COLUMNS, aggregate_traces

PANEL_LABELS = {
    "angle_deg": "gradient angle (deg)",
    "sq_norm": "squared parameter norm",
    "train_loss": "train loss",
    "test_loss": "test loss",
    "test_metric": "test metric",
}


def render_curves(trace_paths, out_path):
    """Five stacked panels (angle, sq norm, train/test loss, test metric):
    per-step mean across runs with a +/- 1 std band."""
    traces = [schemas.read_trace(p) for p in sorted(trace_paths)]
    index, stats = aggregate_traces(traces)
    fig, axes = plt.subplots(len(PANEL_COLUMNS), 1, sharex=True,
                             figsize=(7, 11))
    for ax, col in zip(axes, PANEL_COLUMNS):
        mean, std = stats[col]
        ax.plot(index, mean, lw=1.2)
        ax.fill_between(index, mean - std, mean + std, alpha=0.3)
        ax.set_ylabel(PANEL_LABELS[col])
        ax.grid(True, alpha=0.3)
    axes[-1].set_xlabel("predictor step")
    axes[0].set_title(f"level-set traversal, {len(traces)} run(s)")
    fig.tight_layout()
    fig.savefig(out_path, dpi=150)
    plt.close(fig)


def render_toy_path(path_csvs, out_path):
    """Traversal path(s) over the unit-circle constraint contour and the
    x + y objective contours."""
    fig, ax = plt.subplots(figsize=(6, 6))
    grid = np.linspace(-1.6, 1.6, 200)
    gx, gy = np.meshgrid(grid, grid)
    obj = ax.contour(gx, gy, gx + gy, levels=11, cmap="viridis", alpha=0.6)
    ax.clabel(obj, inline=True, fontsize=7)
    angles = np.linspace(0.0, 2.0 * np.pi, 400)
    ax.plot(np.cos(angles), np.sin(angles), "k--", lw=1.2,
            label="constraint $x^2+y^2=1$")
    for p in sorted(path_csvs):
        x, y = schemas.read_path(p)
        ax.plot(x, y, lw=1.5)
        ax.plot(x[0], y[0], "go", ms=5)
        ax.plot(x[-1], y[-1], "r*", ms=10)
    ax.set_aspect("equal")
    ax.set_xlabel("x")
    ax.set_ylabel("y")
    ax.set_title("constrained toy traversal")
    ax.legend(loc="upper right", fontsize=8)
    fig.tight_layout()
    fig.savefig(out_path, dpi=150)
    plt.close(fig)


def render_pca_3d(projection_csvs, out_path):
    """Paired 3-D views of each trajectory in the top PCA components:
    components 1-3 on the left, 4-6 on the right when available."""
    [path] = list(projection_csvs)
    comps, runs = schemas.read_projections(path)
    triples = [(0, 1, 2)]
    if len(comps) >= 6:
        triples.append((3, 4, 5))
    fig = plt.figure(figsize=(6 * len(triples), 6))
    for pos, (i, j, k) in enumerate(triples):
        ax = fig.add_subplot(1, len(triples), pos + 1, projection="3d")
        for run in sorted(runs):
            _, coords = runs[run]
            ax.plot(coords[:, i], coords[:, j], coords[:, k], lw=1.0)
            ax.scatter(coords[-1, i], coords[-1, j], coords[-1, k],
                       marker="*", s=40)
        ax.set_xlabel(comps[i])
        ax.set_ylabel(comps[j])
        ax.set_zlabel(comps[k])
    fig.suptitle("parameter trajectories, principal components")
    fig.tight_layout()
    fig.savefig(out_path, dpi=150)
    plt.close(fig)


def render_loss_surface(csv_paths, out_path):
    """Train-loss heatmap over the top-2 PCA plane (log-scaled color) with
    projected trajectories overlaid when a projections CSV is supplied."""
    grid_file = proj_file = None
    for p in csv_paths:
        kind = schemas.classify(p)
        if kind == "loss-grid":
            grid_file = p
        elif kind == "projections":
            proj_file = p
    if grid_file is None:
        raise schemas.SchemaError("loss-surface needs a loss_grid CSV input")
    c1, c2, values = schemas.read_loss_grid(grid_file)
    fig, ax = plt.subplots(figsize=(7, 6))
    finite = values[np.isfinite(values)]
    floor = max(float(finite.min()), 1e-12)
    shown = np.ma.masked_invalid(np.clip(values, floor, None))
    mesh = ax.pcolormesh(c1, c2, shown.T, shading="nearest",
                         norm=LogNorm(vmin=floor, vmax=float(finite.max())),
                         cmap="magma")
    fig.colorbar(mesh, ax=ax, label="train loss")
    if proj_file is not None:
        _, runs = schemas.read_projections(proj_file)
        for run in sorted(runs):
            _, coords = runs[run]
            ax.plot(coords[:, 0], coords[:, 1], "w-", lw=1.0, alpha=0.8)
            ax.plot(coords[-1, 0], coords[-1, 1], "c*", ms=9)
    ax.set_xlabel("c1")
    ax.set_ylabel("c2")
    ax.set_title("train loss over the top-2 component plane")
    fig.tight_layout()
    fig.savefig(out_path, dpi=150)
    plt.close(fig)


def render_cost_compare(cost_csvs, out_path):
    """Best-so-far test metric against cumulative example-wise gradient
    evaluations, one line per traversal run plus the sweep's running best."""
    [path] = list(cost_csvs)
    rows = schemas.read_cost(path)
    fig, ax = plt.subplots(figsize=(7, 5))
    methods = {}
    for method, source, evals, metric in rows:
        key = (method, source if method == "traversal" else "sweep")
        methods.setdefault(key, ([], []))
        methods[key][0].append(evals)
        methods[key][1].append(metric)
    for (method, source), (xs, ys) in sorted(methods.items()):
        style = dict(lw=1.0, alpha=0.7) if method == "traversal" else \
            dict(lw=2.0, color="k")
        label = source if method == "traversal" else "weight-decay sweep"
        ax.plot(xs, ys, drawstyle="steps-post", label=label, **style)
    ax.set_xscale("log")
    ax.set_xlabel("cumulative example gradient evaluations")
    ax.set_ylabel("best test metric so far")
    ax.set_title("traversal vs weight-decay cost")
    ax.legend(fontsize=7, ncol=2)
    fig.tight_layout()
    fig.savefig(out_path, dpi=150)
    plt.close(fig)


RENDERERS = {
    "curves": render_curves,
    "toy-path": render_toy_path,
    "pca-3d": render_pca_3d,
    "loss-surface": render_loss_surface,
    "cost-compare": render_cost_compare,
}

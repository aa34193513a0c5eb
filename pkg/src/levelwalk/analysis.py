"""Post-hoc trajectory analysis: snapshot-style PCA over traversal weight
vectors, projection/inverse-transform between weight space and the top-k
subspace, loss evaluation over a grid in the top-2 subspace, and endpoint
averaging."""

from dataclasses import dataclass

import numpy as np

from .network import NumericalFailureError, loss


@dataclass
class PcaModel:
    mean: np.ndarray                      # (N,)
    components: np.ndarray                # (k, N), orthonormal rows
    explained_variance_ratio: np.ndarray  # (k,), non-increasing


@dataclass
class LossGrid:
    c1: np.ndarray          # (resolution,) grid coordinates along component 1
    c2: np.ndarray          # (resolution,) along component 2
    values: np.ndarray      # (resolution, resolution), loss at [i, j] = (c1[i], c2[j])
    explained_variance_ratio: np.ndarray


def pca_fit(points, k: int) -> PcaModel:
    """Top-k principal directions of a cloud of weight vectors.

    Uses the thin SVD of the centered (count x N) matrix, so only
    count-sized factors are formed; the N x N covariance never materializes.
    Component signs are fixed so each row's first nonzero entry is positive.
    """
    x = np.asarray(points, dtype=np.float64)
    if x.ndim != 2 or x.shape[0] < 2:
        raise ValueError("need at least two points")
    count, dim = x.shape
    if k < 1 or k > min(count - 1, dim):
        raise ValueError(f"k={k} out of range for {count} points of dim {dim}")
    mean = x.mean(axis=0)
    _, s, vt = np.linalg.svd(x - mean, full_matrices=False)
    var = s ** 2
    total = var.sum()
    ratios = var[:k] / total if total > 0 else np.zeros(k)
    components = vt[:k].copy()
    for row in components:
        nz = np.flatnonzero(np.abs(row) > 0)
        if nz.size and row[nz[0]] < 0:
            row *= -1.0
    return PcaModel(mean=mean, components=components,
                    explained_variance_ratio=ratios)


def pca_project(model: PcaModel, point) -> np.ndarray:
    """Coordinates of a weight vector in the component basis."""
    p = np.asarray(point, dtype=np.float64)
    return model.components @ (p - model.mean)


def pca_inverse(model: PcaModel, coords) -> np.ndarray:
    """mean + sum_i coords[i] * component_i; exact inverse of pca_project for
    points inside the component span."""
    c = np.asarray(coords, dtype=np.float64)
    if c.shape != (model.components.shape[0],):
        raise ValueError("coordinate dimension mismatch")
    return model.mean + c @ model.components


def grid_ranges(model: PcaModel, points, padding=0.10):
    """Bounding box of the projected points in the top-2 component plane,
    padded by a fraction per side."""
    proj = np.array([pca_project(model, p)[:2] for p in np.asarray(points)])
    lo, hi = proj.min(axis=0), proj.max(axis=0)
    pad = (hi - lo) * padding
    return (lo[0] - pad[0], hi[0] + pad[0]), (lo[1] - pad[1], hi[1] + pad[1])


def loss_grid(model: PcaModel, spec, train, ranges, resolution=100) -> LossGrid:
    """Training loss over a regular grid in the top-2 subspace. Each cell's
    weight vector is the inverse transform of (c1, c2) with the remaining
    coordinates zero. Overflowing cells are flagged NaN, not fatal."""
    if model.components.shape[0] < 2:
        raise ValueError("need a model with at least 2 components")
    (a0, a1), (b0, b1) = ranges
    c1 = np.linspace(a0, a1, resolution)
    c2 = np.linspace(b0, b1, resolution)
    values = np.empty((resolution, resolution))
    coords = np.zeros(model.components.shape[0])
    for i, u in enumerate(c1):
        for j, v in enumerate(c2):
            coords[:] = 0.0
            coords[0], coords[1] = u, v
            theta = pca_inverse(model, coords)
            try:
                values[i, j] = loss(spec, theta, train.features, train.targets)
            except (NumericalFailureError, FloatingPointError):
                values[i, j] = np.nan
    return LossGrid(c1=c1, c2=c2, values=values,
                    explained_variance_ratio=model.explained_variance_ratio)


def mean_endpoint(endpoints, spec=None, train=None):
    """Arithmetic mean of traversal endpoints and, when a network spec and
    training split are given, the training loss at that mean."""
    pts = np.asarray(endpoints, dtype=np.float64)
    if pts.ndim != 2 or pts.shape[0] < 2:
        raise ValueError("need at least two endpoints")
    mean = pts.mean(axis=0)
    if spec is None:
        return mean, None
    return mean, loss(spec, mean, train.features, train.targets)

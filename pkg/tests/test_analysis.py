import numpy as np
import pytest

from levelwalk.analysis import (LossGrid, PcaModel, grid_ranges, loss_grid,
                                mean_endpoint, pca_fit, pca_inverse,
                                pca_project)
from levelwalk.datasets import Dataset
from levelwalk.network import NetworkSpec, glorot_init, loss
from oracles import pca_eigh


def test_collinear_cloud_single_component():
    u = np.array([1.0, 2.0, -1.0])
    pts = np.outer(np.linspace(-2, 2, 9), u)
    model = pca_fit(pts, 1)
    direction = model.components[0]
    assert abs(abs(direction @ u / np.linalg.norm(u)) - 1.0) < 1e-12
    assert model.explained_variance_ratio[0] == pytest.approx(1.0)


def test_two_point_cloud_full_ratio():
    model = pca_fit(np.array([[0.0, 0.0], [3.0, 4.0]]), 1)
    assert model.explained_variance_ratio[0] == pytest.approx(1.0)


def test_matches_covariance_eigendecomposition_oracle():
    rng = np.random.default_rng(0)
    pts = rng.normal(size=(50, 10)) @ np.diag(np.linspace(3, 0.1, 10))
    k = 4
    model = pca_fit(pts, k)
    eigvals, comps = pca_eigh(pts, k)
    ratios = eigvals[:k] / eigvals.sum()
    assert np.allclose(model.explained_variance_ratio, ratios, rtol=1e-8)
    for ours, theirs in zip(model.components, comps):
        assert abs(abs(ours @ theirs) - 1.0) < 1e-8  # aligned up to sign


def test_components_orthonormal_and_ratios_sorted():
    rng = np.random.default_rng(1)
    model = pca_fit(rng.normal(size=(30, 12)), 5)
    gram = model.components @ model.components.T
    assert np.allclose(gram, np.eye(5), atol=1e-9)
    r = model.explained_variance_ratio
    assert np.all(np.diff(r) <= 1e-12)
    assert np.all((r >= 0) & (r <= 1))
    assert r.sum() <= 1 + 1e-12


def test_sign_convention_deterministic():
    rng = np.random.default_rng(2)
    pts = rng.normal(size=(20, 6))
    m1 = pca_fit(pts, 3)
    m2 = pca_fit(pts[::-1].copy(), 3)  # same cloud, different row order
    for c1, c2 in zip(m1.components, m2.components):
        nz = np.flatnonzero(np.abs(c1) > 1e-12)[0]
        assert c1[nz] > 0
        assert np.allclose(c1, c2, atol=1e-9)


def test_k_bounds_checked():
    pts = np.zeros((3, 5))
    pts[1, 0] = 1.0
    with pytest.raises(ValueError):
        pca_fit(pts, 3)  # k > count-1
    with pytest.raises(ValueError):
        pca_fit(pts[:1], 1)  # single point


def test_project_mean_is_origin():
    rng = np.random.default_rng(3)
    pts = rng.normal(size=(15, 8))
    model = pca_fit(pts, 4)
    assert np.allclose(pca_project(model, model.mean), 0.0, atol=1e-12)


def test_component_axis_round_trip():
    rng = np.random.default_rng(4)
    model = pca_fit(rng.normal(size=(15, 8)), 4)
    p = model.mean + 3.0 * model.components[0]
    coords = pca_project(model, p)
    assert np.allclose(coords, [3.0, 0.0, 0.0, 0.0], atol=1e-9)
    assert np.allclose(pca_inverse(model, coords), p, atol=1e-9)


def test_in_span_round_trip_residual():
    rng = np.random.default_rng(5)
    model = pca_fit(rng.normal(size=(15, 8)), 4)
    coords = rng.normal(size=4)
    p = pca_inverse(model, coords)
    assert np.linalg.norm(pca_inverse(model, pca_project(model, p)) - p) < 1e-9


@pytest.fixture
def tiny_net_setup():
    spec = NetworkSpec((3, 6, 2))
    rng = np.random.default_rng(6)
    train = Dataset("t", rng.normal(size=(20, 3)),
                    rng.integers(0, 2, 20), ["a", "b", "c"], "classification")
    points = np.array([glorot_init(spec, s) for s in range(8)])
    return spec, train, points


def test_loss_grid_values_nonnegative(tiny_net_setup):
    spec, train, points = tiny_net_setup
    model = pca_fit(points, 2)
    ranges = grid_ranges(model, points)
    grid = loss_grid(model, spec, train, ranges, resolution=8)
    assert grid.values.shape == (8, 8)
    assert np.all(grid.values[np.isfinite(grid.values)] >= 0.0)


def test_loss_grid_cell_matches_direct_loss(tiny_net_setup):
    spec, train, points = tiny_net_setup
    model = pca_fit(points, 2)
    grid = loss_grid(model, spec, train, ((-1.0, 1.0), (-0.5, 0.5)), resolution=5)
    theta = pca_inverse(model, np.array([grid.c1[2], grid.c2[3]]))
    assert grid.values[2, 3] == pytest.approx(
        loss(spec, theta, train.features, train.targets))


def test_loss_grid_needs_two_components(tiny_net_setup):
    spec, train, points = tiny_net_setup
    model = pca_fit(points, 1)
    with pytest.raises(ValueError):
        loss_grid(model, spec, train, ((-1, 1), (-1, 1)), resolution=4)


def test_grid_ranges_pad_bounding_box():
    model = PcaModel(mean=np.zeros(2), components=np.eye(2),
                     explained_variance_ratio=np.array([0.6, 0.4]))
    pts = np.array([[0.0, 0.0], [10.0, 2.0]])
    (a0, a1), (b0, b1) = grid_ranges(model, pts)
    assert (a0, a1) == (pytest.approx(-1.0), pytest.approx(11.0))
    assert (b0, b1) == (pytest.approx(-0.2), pytest.approx(2.2))


def test_mean_endpoint(tiny_net_setup):
    spec, train, points = tiny_net_setup
    same = np.array([points[0], points[0]])
    mean, val = mean_endpoint(same, spec, train)
    assert np.allclose(mean, points[0])
    assert val == pytest.approx(loss(spec, points[0], train.features, train.targets))
    mid, _ = mean_endpoint(np.array([[1.0, 3.0], [3.0, 1.0]]))
    assert np.allclose(mid, [2.0, 2.0])
    with pytest.raises(ValueError):
        mean_endpoint(points[:1])

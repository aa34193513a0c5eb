import numpy as np
import pytest

from levelwalk.datasets import Dataset
from levelwalk.network import NetworkSpec, loss
from levelwalk.phase1 import Phase1Config, train_phase1
from levelwalk.weight_decay import (DecayConfig, DEFAULT_LAMBDA_GRID,
                                    lambda_sweep, train_weight_decay)
from oracles import check_gradient

SPEC = NetworkSpec((3, 10, 2))


def blobs(seed=0, n=40):
    rng = np.random.default_rng(seed)
    y = rng.integers(0, 2, n)
    x = rng.normal(size=(n, 3)) * 0.3 + np.where(y[:, None] == 1, 1.5, -1.5)
    return Dataset("blobs", x, y, ["a", "b", "c"], "classification")


def test_default_grid_spans_powers_of_ten():
    assert len(DEFAULT_LAMBDA_GRID) == 13
    assert DEFAULT_LAMBDA_GRID[0] == pytest.approx(1e-6)
    assert DEFAULT_LAMBDA_GRID[-1] == pytest.approx(1e6)


def test_lambda_zero_reduces_to_phase1():
    train = blobs()
    cfg = Phase1Config(epochs=15, seed=5)
    theta_decay, _ = train_weight_decay(SPEC, train, train, 0.0, cfg)
    theta_plain, _ = train_phase1(SPEC, train.features, train.targets, cfg)
    assert np.array_equal(theta_decay, theta_plain)


def test_extreme_decay_shrinks_weights():
    train = blobs()
    cfg = Phase1Config(epochs=30, seed=2)
    theta_free, _ = train_weight_decay(SPEC, train, train, 0.0, cfg)
    theta_heavy, _ = train_weight_decay(SPEC, train, train, 1e6, cfg)
    assert theta_heavy @ theta_heavy < theta_free @ theta_free


def test_decayed_objective_gradient_finite_differences():
    train = blobs()
    rng = np.random.default_rng(7)
    theta = rng.normal(size=SPEC.param_count) * 0.3
    lam = 0.01
    from levelwalk.network import loss_and_gradient
    _, grad = loss_and_gradient(SPEC, theta, train.features, train.targets)
    grad = grad + 2.0 * lam * theta

    def objective(t):
        return loss(SPEC, t, train.features, train.targets) + lam * float(t @ t)

    check_gradient(objective, grad, theta, rng)


def test_negative_lambda_rejected():
    with pytest.raises(ValueError):
        train_weight_decay(SPEC, blobs(), blobs(), -1.0, Phase1Config(epochs=1))


def test_config_validation():
    with pytest.raises(ValueError):
        DecayConfig(lambda_grid=())
    with pytest.raises(ValueError):
        DecayConfig(lambda_grid=(1.0, 0.1))
    with pytest.raises(ValueError):
        DecayConfig(runs_per_lambda=0)


def test_single_lambda_grid_is_trivially_best():
    train = blobs()
    cfg = DecayConfig(lambda_grid=(1e-3,), runs_per_lambda=2, epochs=10)
    sweep = lambda_sweep(SPEC, train, train, cfg)
    assert sweep.best_lambda == pytest.approx(1e-3)
    assert len(sweep.runs) == 2


def test_sweep_reproducible_and_seeded():
    train = blobs()
    cfg = DecayConfig(lambda_grid=(1e-4, 1e-2), runs_per_lambda=3, epochs=8,
                      seed_base=10)
    s1 = lambda_sweep(SPEC, train, train, cfg)
    s2 = lambda_sweep(SPEC, train, train, cfg)
    assert [r.seed for r in s1.runs] == [10, 11, 12, 10, 11, 12]
    assert [r.test_metric for r in s1.runs] == [r.test_metric for r in s2.runs]
    assert s1.best_lambda == s2.best_lambda
    for lam, (mean, std, n) in s1.per_lambda.items():
        assert n == 3


def test_regression_best_lambda_minimizes_mse():
    rng = np.random.default_rng(0)
    x = rng.normal(size=(40, 3))
    y = x @ np.array([1.0, -2.0, 0.5]) + 0.1 * rng.normal(size=40)
    train = Dataset("lin", x, y, ["a", "b", "c"], "regression")
    spec = NetworkSpec((3, 8, 1), head="linear")
    cfg = DecayConfig(lambda_grid=(1e-4, 1e4), runs_per_lambda=2, epochs=40)
    sweep = lambda_sweep(spec, train, train, cfg)
    # crushing decay cannot fit the targets at all; small lambda must win
    assert sweep.best_lambda == pytest.approx(1e-4)

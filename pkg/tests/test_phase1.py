import numpy as np
import pytest

from levelwalk.network import GradEvalCounter, NetworkSpec, glorot_init, loss
from levelwalk.phase1 import AdamState, Phase1Config, adam_step, train_phase1

SPEC = NetworkSpec((3, 10, 2))


def toy_problem(seed=0, n=40):
    """Separable 2-class blobs a tiny net can drive to near-zero loss."""
    rng = np.random.default_rng(seed)
    y = rng.integers(0, 2, n)
    x = rng.normal(size=(n, 3)) * 0.3 + np.where(y[:, None] == 1, 1.5, -1.5)
    return x, y


def test_adam_zero_gradient_no_move():
    cfg = Phase1Config()
    theta = np.ones(5)
    state, new_theta = adam_step(AdamState.zeros(5), theta, np.zeros(5), cfg)
    assert state.t == 1
    assert np.allclose(new_theta, theta)


def test_adam_first_step_is_signed_lr():
    # bias correction makes the very first update ~ -lr * sign(g)
    cfg = Phase1Config(lr=1e-3)
    g = np.array([0.5, -2.0, 1e-4])
    _, new_theta = adam_step(AdamState.zeros(3), np.zeros(3), g, cfg)
    assert np.allclose(new_theta, -cfg.lr * np.sign(g), rtol=1e-3)


def test_adam_deterministic():
    cfg = Phase1Config()
    g = np.array([1.0, -1.0])
    s0 = AdamState.zeros(2)
    out1 = adam_step(s0, np.zeros(2), g, cfg)
    out2 = adam_step(AdamState.zeros(2), np.zeros(2), g, cfg)
    assert np.array_equal(out1[1], out2[1])
    assert np.array_equal(out1[0].m, out2[0].m)


def test_adam_dimension_mismatch():
    with pytest.raises(ValueError):
        adam_step(AdamState.zeros(3), np.zeros(4), np.zeros(4), Phase1Config())


def test_zero_epochs_returns_initialization():
    x, y = toy_problem()
    cfg = Phase1Config(epochs=0, seed=3)
    theta, final_loss = train_phase1(SPEC, x, y, cfg)
    assert np.array_equal(theta, glorot_init(SPEC, 3))
    assert final_loss == pytest.approx(loss(SPEC, theta, x, y))


def test_training_reduces_loss_and_is_deterministic():
    x, y = toy_problem()
    cfg = Phase1Config(epochs=60, seed=1)
    theta0 = glorot_init(SPEC, 1)
    start_loss = loss(SPEC, theta0, x, y)
    theta_a, loss_a = train_phase1(SPEC, x, y, cfg)
    theta_b, loss_b = train_phase1(SPEC, x, y, cfg)
    assert loss_a <= start_loss
    assert loss_a < 0.1
    assert np.array_equal(theta_a, theta_b)
    assert loss_a == loss_b


def test_counter_counts_epochs_times_examples():
    x, y = toy_problem(n=37)  # last minibatch is partial and must be used
    counter = GradEvalCounter()
    train_phase1(SPEC, x, y, Phase1Config(epochs=4, seed=0), counter)
    assert counter.count == 4 * 37


def test_empty_training_set_rejected():
    with pytest.raises(ValueError):
        train_phase1(SPEC, np.zeros((0, 3)), np.zeros(0, dtype=int), Phase1Config())


def test_config_validation():
    with pytest.raises(ValueError):
        Phase1Config(batch_size=0)
    with pytest.raises(ValueError):
        Phase1Config(lr=0.0)

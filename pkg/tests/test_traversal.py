import numpy as np
import pytest

from levelwalk import toy
from levelwalk.traversal import (AntiParallelSignal, CorrectorStall,
                                 TraversalConfig, adapt_lr, corrector_step,
                                 predictor_step, traverse)

CFG = TraversalConfig()


def test_config_validation():
    with pytest.raises(ValueError):
        TraversalConfig(lr_decrease_factor=1.5)
    with pytest.raises(ValueError):
        TraversalConfig(deviation_threshold=0.0)
    with pytest.raises(ValueError):
        TraversalConfig(initial_lr_predictor=-1.0)


def test_predictor_orthogonal_gradients():
    # reg grad orthogonal to loss grad: projection vanishes, step along -reg
    theta = np.array([1.0, 1.0])
    new_theta, delta_p = predictor_step(theta, np.array([0.0, 2.0]),
                                        np.array([3.0, 0.0]), lr=0.1)
    assert np.allclose(delta_p, [3.0, 0.0])
    assert np.allclose(new_theta, [0.9, 1.0])


def test_predictor_anti_parallel_signal():
    g = np.array([1.0, 2.0])
    with pytest.raises(AntiParallelSignal):
        predictor_step(np.zeros(2), g, -g, lr=0.1)


def test_predictor_toy_hand_evaluated():
    # circle point (0,1): loss grad (0,2), objective grad (1,1) -> delta_p (1,0)
    new_theta, delta_p = predictor_step(np.array([0.0, 1.0]), np.array([0.0, 2.0]),
                                        np.array([1.0, 1.0]), lr=0.05)
    assert np.allclose(delta_p, [1.0, 0.0])
    assert np.allclose(new_theta, [-0.05, 1.0])


def test_predictor_step_has_length_lr():
    rng = np.random.default_rng(0)
    theta = rng.normal(size=20)
    new_theta, _ = predictor_step(theta, rng.normal(size=20), rng.normal(size=20), 0.37)
    assert np.linalg.norm(new_theta - theta) == pytest.approx(0.37)


def test_predictor_direction_orthogonal_to_loss_grad():
    rng = np.random.default_rng(1)
    for _ in range(50):
        lgrad, rgrad = rng.normal(size=(2, 30))
        _, delta_p = predictor_step(np.zeros(30), lgrad, rgrad, 0.1)
        bound = 1e-9 * np.linalg.norm(delta_p) * np.linalg.norm(lgrad)
        assert abs(delta_p @ lgrad) <= max(bound, 1e-15)


def test_corrector_orthogonal_case():
    new_theta, delta_c = corrector_step(np.zeros(2), np.array([0.0, 3.0]),
                                        np.array([1.0, 0.0]), lr=0.1)
    assert np.allclose(delta_c, [0.0, 3.0])
    assert np.allclose(new_theta, [0.0, -0.1])


def test_corrector_stall_on_parallel():
    d = np.array([2.0, 0.0])
    with pytest.raises(CorrectorStall):
        corrector_step(np.zeros(2), d, d, lr=0.1)


def test_corrector_hand_evaluated():
    new_theta, delta_c = corrector_step(np.zeros(2), np.array([2.0, 2.0]),
                                        np.array([1.0, 0.0]), lr=0.1)
    assert np.allclose(delta_c, [0.0, 2.0])
    assert np.allclose(new_theta, [0.0, -0.1])


def test_corrector_without_predictor_direction():
    new_theta, delta_c = corrector_step(np.zeros(2), np.array([0.0, 4.0]),
                                        None, lr=0.5)
    assert np.allclose(delta_c, [0.0, 4.0])
    assert np.allclose(new_theta, [0.0, -0.5])


def test_adapt_lr_rules():
    small = np.array([1.0, 0.0])
    nudged = np.array([np.cos(np.radians(0.05)), np.sin(np.radians(0.05))])
    bent = np.array([np.cos(np.radians(5.0)), np.sin(np.radians(5.0))])
    assert adapt_lr(small, nudged, 1.0, CFG) == pytest.approx(1.1)
    assert adapt_lr(small, bent, 1.0, CFG) == pytest.approx(0.1)
    assert adapt_lr(small, small, 1.0, CFG) == pytest.approx(1.1)  # 0 degrees
    assert adapt_lr(None, small, 1.0, CFG) == 1.0  # first step unchanged


def test_traverse_determinism_on_toy():
    start = toy.random_start(11)
    r1 = toy.toy_traverse(start)
    r2 = toy.toy_traverse(start)
    assert r1.stop_reason == r2.stop_reason
    assert len(r1.trace) == len(r2.trace)
    assert np.array_equal(r1.final_theta, r2.final_theta)
    for a, b in zip(r1.trace, r2.trace):
        assert a == b


def test_traverse_trace_contract():
    result = toy.toy_traverse(toy.random_start(5))
    prev_evals = -1
    for rec in result.trace:
        assert rec.train_loss >= 0.0
        assert 0.0 <= rec.angle_deg <= 180.0
        assert rec.cum_grad_evals > prev_evals
        prev_evals = rec.cum_grad_evals
    assert len(result.trace) <= toy.TOY_CONFIG.max_predictor_steps


def test_traverse_stops_on_max_steps():
    cfg = TraversalConfig(max_predictor_steps=7, antiparallel_stop_deg=0.5)
    result = toy.toy_traverse(toy.random_start(3), cfg)
    assert result.stop_reason == "max-steps"
    assert len(result.trace) == 7


def test_traverse_immediate_stop_at_optimum():
    result = toy.toy_traverse(toy.OPTIMUM.copy())
    assert result.stop_reason == "anti-parallel"
    assert len(result.trace) == 1

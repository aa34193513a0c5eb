"""2-D anchor problem: minimize x + y on the unit circle, run through the
same predictor/corrector engine. The circle x^2 + y^2 = 1 plays the role of
the fixed-loss level set and the objective x + y plays the regularizer, so
the analytic optimum (-sqrt(2)/2, -sqrt(2)/2) checks the whole walk."""

from dataclasses import dataclass, replace

import numpy as np

from .objectives import deviation_value_and_grad
from .traversal import TraversalConfig, TraversalResult, traverse

OPTIMUM = np.array([-np.sqrt(2.0) / 2.0, -np.sqrt(2.0) / 2.0])

# A tighter anti-parallel stop than the network default: on the circle the
# angle gap maps directly to arc distance from the optimum, and stopping at
# 0.5 degrees leaves the endpoint within ~9e-3 of it.
TOY_CONFIG = TraversalConfig(
    max_predictor_steps=20000,
    antiparallel_stop_deg=0.5,
    snapshot_stride=1,
)


def toy_constraint_deviation(point, reference: float):
    """Squared deviation of x^2 + y^2 from its reference value, with its
    chain-rule gradient 2*(L - reference)*(2x, 2y)."""
    p = np.asarray(point, dtype=np.float64)
    level = float(p @ p)
    return deviation_value_and_grad(level, 2.0 * p, reference)


class ToyProblem:
    """Circle constraint as the training loss, x + y as the regularizer.
    Each loss/gradient evaluation counts one example-wise gradient."""

    def __init__(self):
        self.evals = 0

    def train_loss_and_grad(self, point):
        p = np.asarray(point, dtype=np.float64)
        self.evals += 1
        return float(p @ p), 2.0 * p

    def reg_value_and_grad(self, point):
        p = np.asarray(point, dtype=np.float64)
        return float(p.sum()), np.ones(2)

    def eval_metrics(self, point):
        p = np.asarray(point, dtype=np.float64)
        objective = float(p.sum())
        return float(p @ p), objective

    def grad_evals(self):
        return self.evals


def random_start(seed: int) -> np.ndarray:
    """Uniformly random point on the unit circle."""
    phi = np.random.default_rng(seed).uniform(0.0, 2.0 * np.pi)
    return np.array([np.cos(phi), np.sin(phi)])


def toy_traverse(start, config: TraversalConfig = TOY_CONFIG) -> TraversalResult:
    start = np.asarray(start, dtype=np.float64)
    if abs(start @ start - 1.0) > 1e-9:
        raise ValueError("start point must lie on the unit circle")
    return traverse(ToyProblem(), start, config)


def path_points(result: TraversalResult) -> np.ndarray:
    """(n, 2) array of visited points, for path files and plotting."""
    return np.array(result.snapshots)

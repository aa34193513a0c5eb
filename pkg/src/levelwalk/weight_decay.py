"""Weight-decay comparison arm: single-phase Adam on L(theta) +
lambda * theta.theta, swept over a log10 grid of lambda values."""

import math
from dataclasses import dataclass, field, replace

import numpy as np

from .network import (GradEvalCounter, NetworkSpec, NumericalFailureError,
                      accuracy, loss)
from .phase1 import Phase1Config, train_phase1

DEFAULT_LAMBDA_GRID = tuple(10.0 ** e for e in range(-6, 7))


@dataclass(frozen=True)
class DecayConfig:
    lambda_grid: tuple = DEFAULT_LAMBDA_GRID
    runs_per_lambda: int = 10
    epochs: int = 500
    batch_size: int = 32
    seed_base: int = 0

    def __post_init__(self):
        grid = tuple(float(v) for v in self.lambda_grid)
        object.__setattr__(self, "lambda_grid", grid)
        if not grid or list(grid) != sorted(grid):
            raise ValueError("lambda grid must be non-empty and ascending")
        if self.runs_per_lambda < 1:
            raise ValueError("need at least one run per lambda")


@dataclass
class DecayRun:
    lam: float
    run: int
    seed: int
    test_metric: float
    final_sq_norm: float
    failed: bool
    theta: np.ndarray = None


@dataclass
class SweepResult:
    runs: list
    per_lambda: dict          # lam -> (mean, std, n_ok)
    best_lambda: float
    task: str


def train_weight_decay(spec: NetworkSpec, train, test, lam: float,
                       config: Phase1Config, counter: GradEvalCounter = None):
    """One decayed training run; returns (theta, test metric). lam = 0
    reduces exactly to plain phase-1 training for the same seed."""
    if lam < 0:
        raise ValueError("lambda must be non-negative")
    theta, _ = train_phase1(spec, train.features, train.targets, config,
                            counter, weight_decay=lam)
    if spec.head == "softmax":
        metric = accuracy(spec, theta, test.features, test.targets)
    else:
        metric = loss(spec, theta, test.features, test.targets) \
            * getattr(test, "metric_scale", 1.0)
    return theta, metric


def run_one(spec, train, test, lam, run, config: DecayConfig,
            keep_theta=False) -> DecayRun:
    seed = config.seed_base + run
    p1 = Phase1Config(batch_size=config.batch_size, epochs=config.epochs, seed=seed)
    try:
        theta, metric = train_weight_decay(spec, train, test, lam, p1)
    except NumericalFailureError:
        return DecayRun(lam, run, seed, math.nan, math.nan, failed=True)
    return DecayRun(lam, run, seed, metric, float(theta @ theta), failed=False,
                    theta=theta if keep_theta else None)


def lambda_sweep(spec: NetworkSpec, train, test, config: DecayConfig,
                 jobs: int = 1, keep_theta=False) -> SweepResult:
    """Train runs_per_lambda seeded networks per grid value; aggregate the
    test metric over non-failed runs. Best lambda maximizes mean accuracy
    (classification) or minimizes mean MSE (regression); ties break toward
    the smaller lambda. (lambda, run) tasks are independent and may run in
    a process pool."""
    tasks = [(lam, run) for lam in config.lambda_grid
             for run in range(config.runs_per_lambda)]
    if jobs > 1:
        from concurrent.futures import ProcessPoolExecutor
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            runs = list(pool.map(_run_one_star,
                                 [(spec, train, test, lam, run, config, keep_theta)
                                  for lam, run in tasks]))
    else:
        runs = [run_one(spec, train, test, lam, run, config, keep_theta)
                for lam, run in tasks]

    per_lambda = {}
    for lam in config.lambda_grid:
        vals = [r.test_metric for r in runs if r.lam == lam and not r.failed]
        if not vals:
            continue  # every run for this lambda diverged; excluded
        per_lambda[lam] = (float(np.mean(vals)), float(np.std(vals)), len(vals))
    if not per_lambda:
        raise RuntimeError("all weight-decay runs failed")
    sign = 1.0 if train.task == "classification" else -1.0
    best = max(sorted(per_lambda), key=lambda lam: (sign * per_lambda[lam][0], -lam))
    return SweepResult(runs=runs, per_lambda=per_lambda, best_lambda=best,
                       task=train.task)


def _run_one_star(args):
    return run_one(*args)

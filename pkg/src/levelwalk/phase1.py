"""Phase 1: seeded minibatch Adam training from Glorot init down to a
near-zero training-loss point, optionally with a weight-decay term (the
baseline arm reuses this trainer with lam > 0)."""

from dataclasses import dataclass, replace

import numpy as np

from .network import (GradEvalCounter, NetworkSpec, NumericalFailureError,
                      glorot_init, loss, loss_and_gradient)


@dataclass(frozen=True)
class Phase1Config:
    batch_size: int = 32
    epochs: int = 500
    lr: float = 1e-3
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8
    seed: int = 0

    def __post_init__(self):
        if self.batch_size < 1 or self.epochs < 0 or self.lr <= 0:
            raise ValueError("invalid phase-1 config")


@dataclass
class AdamState:
    m: np.ndarray
    v: np.ndarray
    t: int = 0

    @classmethod
    def zeros(cls, n):
        return cls(m=np.zeros(n), v=np.zeros(n), t=0)


def adam_step(state: AdamState, theta: np.ndarray, grad: np.ndarray,
              config: Phase1Config):
    """One bias-corrected Adam update. Purely functional: returns the new
    (state, theta) without mutating the inputs."""
    if state.m.shape != theta.shape or grad.shape != theta.shape:
        raise ValueError("dimension mismatch in Adam state")
    t = state.t + 1
    m = config.beta1 * state.m + (1.0 - config.beta1) * grad
    v = config.beta2 * state.v + (1.0 - config.beta2) * grad ** 2
    m_hat = m / (1.0 - config.beta1 ** t)
    v_hat = v / (1.0 - config.beta2 ** t)
    new_theta = theta - config.lr * m_hat / (np.sqrt(v_hat) + config.eps)
    return AdamState(m=m, v=v, t=t), new_theta


def train_phase1(spec: NetworkSpec, x, y, config: Phase1Config,
                 counter: GradEvalCounter = None, weight_decay: float = 0.0):
    """Minibatch Adam from a fresh Glorot init; returns (theta0, final loss
    on the full training split).

    Shuffles every epoch with the run seed; the last partial minibatch is
    used, not dropped. With weight_decay > 0 the objective gains
    weight_decay * theta.theta (gradient contribution 2*weight_decay*theta).
    """
    x = np.asarray(x, dtype=np.float64)
    n = x.shape[0]
    if n == 0:
        raise ValueError("empty training set")
    rng = np.random.default_rng(config.seed)
    theta = glorot_init(spec, config.seed)
    state = AdamState.zeros(theta.size)
    for _ in range(config.epochs):
        order = rng.permutation(n)
        for start in range(0, n, config.batch_size):
            idx = order[start:start + config.batch_size]
            value, grad = loss_and_gradient(spec, theta, x[idx], y[idx], counter)
            if weight_decay > 0.0:
                grad = grad + (2.0 * weight_decay) * theta
            if not np.isfinite(value):
                raise NumericalFailureError("training loss diverged", {"loss": value})
            state, theta = adam_step(state, theta, grad, config)
    return theta, loss(spec, theta, x, y)

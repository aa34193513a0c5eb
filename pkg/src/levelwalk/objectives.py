"""Scalar fields steering phase 2: the squared-L2 regularizer and the
squared deviation of training loss from its value at the walk's start."""

from dataclasses import dataclass

import numpy as np


def reg_value_and_grad(theta: np.ndarray):
    """Squared L2 norm theta.theta and its gradient 2*theta (biases included:
    the regularizer is defined on the full flat vector)."""
    theta = np.asarray(theta, dtype=np.float64)
    return float(theta @ theta), 2.0 * theta


def deviation_value_and_grad(current_loss: float, loss_grad: np.ndarray,
                             reference_loss: float):
    """Squared loss deviation (current - reference)^2 and its chain-rule
    gradient 2*(current - reference)*loss_grad."""
    diff = float(current_loss) - float(reference_loss)
    return diff * diff, (2.0 * diff) * np.asarray(loss_grad, dtype=np.float64)


@dataclass(frozen=True)
class LossDeviation:
    """Deviation functional anchored at the reference loss captured once at
    the start of the walk and never updated."""

    reference_loss: float

    def __post_init__(self):
        if not np.isfinite(self.reference_loss) or self.reference_loss < 0:
            raise ValueError("reference loss must be finite and non-negative")

    def value_and_grad(self, current_loss, loss_grad):
        return deviation_value_and_grad(current_loss, loss_grad, self.reference_loss)

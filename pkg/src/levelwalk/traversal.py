"""Phase 2: predictor/corrector walk along a fixed training-loss level set.

Each predictor step moves against the regularizer gradient with its
component along the loss gradient projected away, so to first order the
training loss is unchanged. Corrector steps pull the point back onto the
level set whenever the squared loss deviation exceeds its threshold,
constrained orthogonal to the last predictor direction. Both step types
carry their own adaptively tuned learning rate.
"""

from dataclasses import dataclass, field

import numpy as np

from . import vecmath
from .network import GradEvalCounter, NumericalFailureError, accuracy, loss
from .objectives import deviation_value_and_grad, reg_value_and_grad

STOP_MAX_STEPS = "max-steps"
STOP_ANTI_PARALLEL = "anti-parallel"
STOP_NUMERICAL_FAILURE = "numerical-failure"

# Relative threshold below which a projected direction is treated as zero;
# for the predictor this is numerically indistinguishable from the
# gradients being anti-parallel.
DIRECTION_DEGENERACY = 1e-12

TRACE_HEADER = ("predictor_index,train_loss,test_loss,test_metric,sq_norm,"
                "angle_deg,lr_predictor,lr_corrector,corrector_steps,cum_grad_evals")


class AntiParallelSignal(Exception):
    """Predictor direction degenerate: loss and regularizer gradients are
    (anti-)parallel, the walk is at a constrained stationary point."""


class CorrectorStall(Exception):
    """Deviation gradient is parallel to the predictor direction; no
    orthogonal corrector direction exists at this point."""


@dataclass(frozen=True)
class TraversalConfig:
    deviation_threshold: float = 1e-10
    max_predictor_steps: int = 20000
    angle_change_threshold_deg: float = 0.1
    lr_decrease_factor: float = 0.1
    lr_increase_factor: float = 1.1
    initial_lr_predictor: float = 1e-3
    initial_lr_corrector: float = 1e-3
    max_corrector_steps_per_predictor: int = 1000
    antiparallel_stop_deg: float = 1.0
    metric_stride: int = 1   # test metrics every k-th trace record
    snapshot_stride: int = 0  # keep every k-th theta for PCA (0 = off)

    def __post_init__(self):
        if self.deviation_threshold <= 0 or self.antiparallel_stop_deg <= 0:
            raise ValueError("thresholds must be positive")
        if not (0 < self.lr_decrease_factor < 1 < self.lr_increase_factor):
            raise ValueError("need 0 < decrease factor < 1 < increase factor")
        if self.max_predictor_steps < 1 or self.max_corrector_steps_per_predictor < 1:
            raise ValueError("step budgets must be >= 1")
        if self.initial_lr_predictor <= 0 or self.initial_lr_corrector <= 0:
            raise ValueError("learning rates must be positive")


@dataclass
class TraceRecord:
    predictor_index: int
    train_loss: float
    test_loss: float
    test_metric: float
    sq_norm: float
    angle_deg: float
    lr_predictor: float
    lr_corrector: float
    corrector_steps: int
    cum_grad_evals: int


@dataclass
class TraversalResult:
    trace: list
    final_theta: np.ndarray
    stop_reason: str
    snapshots: list = field(default_factory=list)
    snapshot_indices: list = field(default_factory=list)
    corrector_stalls: int = 0
    corrector_budget_hits: int = 0


def predictor_step(theta, loss_grad, reg_grad, lr):
    """Unit step of length lr along -delta_p, delta_p = reg_grad with its
    loss_grad component rejected. Raises AntiParallelSignal when delta_p is
    degenerate (constrained stationarity reached)."""
    delta_p = vecmath.reject(reg_grad, loss_grad)
    if np.linalg.norm(delta_p) < DIRECTION_DEGENERACY * np.linalg.norm(reg_grad):
        raise AntiParallelSignal
    return theta - lr * vecmath.normalize(delta_p), delta_p


def corrector_step(theta, deviation_grad, delta_p, lr):
    """Unit step of length lr along -delta_c, delta_c = deviation gradient
    with its delta_p component rejected (pass delta_p=None before any
    predictor step has been taken). Returns (new_theta, delta_c)."""
    if delta_p is None:
        delta_c = np.asarray(deviation_grad, dtype=np.float64)
    else:
        delta_c = vecmath.reject(deviation_grad, delta_p)
    if np.linalg.norm(delta_c) < DIRECTION_DEGENERACY * np.linalg.norm(deviation_grad):
        raise CorrectorStall
    return theta - lr * vecmath.normalize(delta_c), delta_c


def adapt_lr(prev_direction, new_direction, lr, config: TraversalConfig):
    """Multiplicative learning-rate heuristic: shrink on an angular change of
    the step direction above the threshold, grow otherwise. First step (no
    previous direction) leaves lr unchanged."""
    if prev_direction is None:
        return lr
    change = vecmath.angle_degrees(prev_direction, new_direction)
    if change > config.angle_change_threshold_deg:
        return lr * config.lr_decrease_factor
    return lr * config.lr_increase_factor


class NetworkProblem:
    """Adapter exposing a training objective, regularizer and test metrics of
    a feed-forward network to the traversal engine."""

    def __init__(self, spec, train_x, train_y, test_x=None, test_y=None,
                 counter: GradEvalCounter = None, metric_scale: float = 1.0):
        self.spec = spec
        self.train_x = np.asarray(train_x, dtype=np.float64)
        self.train_y = train_y
        self.test_x = test_x
        self.test_y = test_y
        self.counter = counter if counter is not None else GradEvalCounter()
        self.metric_scale = metric_scale

    def train_loss_and_grad(self, theta):
        from .network import loss_and_gradient
        return loss_and_gradient(self.spec, theta, self.train_x, self.train_y,
                                 self.counter)

    def reg_value_and_grad(self, theta):
        return reg_value_and_grad(theta)

    def eval_metrics(self, theta):
        """(test loss, test metric): accuracy for classification, MSE in
        reporting units for regression. Forward-only, never counted as
        gradient evaluations."""
        if self.test_x is None:
            return float("nan"), float("nan")
        test_loss = loss(self.spec, theta, self.test_x, self.test_y)
        if self.spec.head == "softmax":
            metric = accuracy(self.spec, theta, self.test_x, self.test_y)
        else:
            metric = test_loss * self.metric_scale
        return test_loss, metric

    def grad_evals(self):
        return self.counter.count


def traverse(problem, theta0, config: TraversalConfig) -> TraversalResult:
    """Walk the level set anchored at L(theta0).

    Per predictor iteration: run corrector steps while the squared loss
    deviation exceeds its threshold (bounded per iteration), record one trace
    row, then take one predictor step. Metrics are recorded at the point
    reached after the correctors, i.e. just before each predictor step.
    Gradient-eval accounting: one full-batch evaluation at the walk start,
    one after every predictor step, one after every corrector step.
    """
    theta = np.array(theta0, dtype=np.float64, copy=True)
    trace = []
    snapshots, snap_idx = [], []
    stalls = 0
    budget_hits = 0
    lr_p = config.initial_lr_predictor
    lr_c = config.initial_lr_corrector
    prev_pdir = None
    prev_cdir = None
    delta_p = None
    last_metrics = (float("nan"), float("nan"))
    stop_reason = STOP_MAX_STEPS

    try:
        train_loss, loss_grad = problem.train_loss_and_grad(theta)
        reference = train_loss

        for n in range(config.max_predictor_steps):
            # corrector phase: return to the level set
            c_steps = 0
            while ((train_loss - reference) ** 2 > config.deviation_threshold
                   and c_steps < config.max_corrector_steps_per_predictor):
                _, dev_grad = deviation_value_and_grad(train_loss, loss_grad, reference)
                try:
                    new_theta, delta_c = corrector_step(theta, dev_grad, delta_p, lr_c)
                except CorrectorStall:
                    stalls += 1
                    break
                cdir = vecmath.normalize(delta_c)
                lr_c = adapt_lr(prev_cdir, cdir, lr_c, config)
                theta = theta - lr_c * cdir
                prev_cdir = cdir
                train_loss, loss_grad = problem.train_loss_and_grad(theta)
                c_steps += 1
            if ((train_loss - reference) ** 2 > config.deviation_threshold
                    and c_steps == config.max_corrector_steps_per_predictor):
                budget_hits += 1

            # trace record, just before the predictor step
            reg_value, reg_grad = problem.reg_value_and_grad(theta)
            angle = vecmath.angle_degrees(loss_grad, reg_grad)
            if n % config.metric_stride == 0:
                last_metrics = problem.eval_metrics(theta)
            trace.append(TraceRecord(
                predictor_index=n,
                train_loss=train_loss,
                test_loss=last_metrics[0],
                test_metric=last_metrics[1],
                sq_norm=float(theta @ theta),
                angle_deg=angle,
                lr_predictor=lr_p,
                lr_corrector=lr_c,
                corrector_steps=c_steps,
                cum_grad_evals=problem.grad_evals(),
            ))
            if config.snapshot_stride and n % config.snapshot_stride == 0:
                snapshots.append(theta.copy())
                snap_idx.append(n)

            if angle >= 180.0 - config.antiparallel_stop_deg:
                stop_reason = STOP_ANTI_PARALLEL
                break
            if n == config.max_predictor_steps - 1:
                stop_reason = STOP_MAX_STEPS
                break

            # predictor step
            new_pdir = vecmath.reject(reg_grad, loss_grad)
            if (np.linalg.norm(new_pdir)
                    < DIRECTION_DEGENERACY * np.linalg.norm(reg_grad)):
                stop_reason = STOP_ANTI_PARALLEL
                break
            pdir = vecmath.normalize(new_pdir)
            lr_p = adapt_lr(prev_pdir, pdir, lr_p, config)
            theta = theta - lr_p * pdir
            delta_p = new_pdir
            prev_pdir = pdir
            train_loss, loss_grad = problem.train_loss_and_grad(theta)
    except AntiParallelSignal:
        stop_reason = STOP_ANTI_PARALLEL
    except NumericalFailureError:
        stop_reason = STOP_NUMERICAL_FAILURE

    return TraversalResult(trace=trace, final_theta=theta, stop_reason=stop_reason,
                           snapshots=snapshots, snapshot_indices=snap_idx,
                           corrector_stalls=stalls, corrector_budget_hits=budget_hits)

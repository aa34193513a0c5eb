"""Feed-forward tanh networks on a flat parameter vector.

The whole network lives in one float64 vector (per layer: weight matrix
row-major, then bias), so the walk over parameter space can treat it as a
point in R^N. Backprop returns the exact gradient of the batch-mean loss
with respect to that flat vector.
"""

from dataclasses import dataclass, field

import numpy as np

# Probabilities are clamped at this floor inside log(); near-zero-loss
# training produces extreme logits.
CROSS_ENTROPY_FLOOR = 1e-12

SOFTMAX = "softmax"
LINEAR = "linear"


class ShapeError(ValueError):
    pass


class NumericalFailureError(FloatingPointError):
    """Non-finite value encountered during a forward/backward pass."""

    def __init__(self, message, context=None):
        super().__init__(message)
        self.context = context or {}


@dataclass(frozen=True)
class NetworkSpec:
    """Layer sizes (input, hidden..., output), tanh hidden activations, and
    either a softmax-classification or linear-regression head."""

    layer_sizes: tuple
    head: str = SOFTMAX

    def __post_init__(self):
        sizes = tuple(int(s) for s in self.layer_sizes)
        object.__setattr__(self, "layer_sizes", sizes)
        if len(sizes) < 3:
            raise ValueError("need at least one hidden layer")
        if any(s < 1 for s in sizes):
            raise ValueError(f"all layer sizes must be >= 1, got {sizes}")
        if self.head not in (SOFTMAX, LINEAR):
            raise ValueError(f"unknown head {self.head!r}")

    @property
    def n_layers(self):
        return len(self.layer_sizes) - 1

    @property
    def param_count(self):
        sizes = self.layer_sizes
        return sum(sizes[i] * sizes[i + 1] + sizes[i + 1] for i in range(len(sizes) - 1))


@dataclass
class GradEvalCounter:
    """Running total of example-wise gradient evaluations (the cost unit for
    method comparison): each batch gradient adds its batch size."""

    count: int = 0

    def add(self, n_examples):
        if n_examples < 0:
            raise ValueError("cannot decrease the counter")
        self.count += int(n_examples)


def glorot_init(spec: NetworkSpec, seed: int) -> np.ndarray:
    """Glorot-normal weights, zero biases, flattened. Deterministic per seed."""
    rng = np.random.default_rng(seed)
    chunks = []
    sizes = spec.layer_sizes
    for i in range(spec.n_layers):
        fan_in, fan_out = sizes[i], sizes[i + 1]
        std = np.sqrt(2.0 / (fan_in + fan_out))
        w = rng.normal(0.0, std, size=(fan_in, fan_out))
        chunks.append(w.ravel())
        chunks.append(np.zeros(fan_out))
    return np.concatenate(chunks)


def unflatten(spec: NetworkSpec, theta: np.ndarray):
    """Views of theta as per-layer (W, b) pairs."""
    theta = np.asarray(theta, dtype=np.float64)
    if theta.shape != (spec.param_count,):
        raise ShapeError(f"theta has shape {theta.shape}, expected ({spec.param_count},)")
    layers = []
    off = 0
    sizes = spec.layer_sizes
    for i in range(spec.n_layers):
        fan_in, fan_out = sizes[i], sizes[i + 1]
        w = theta[off:off + fan_in * fan_out].reshape(fan_in, fan_out)
        off += fan_in * fan_out
        b = theta[off:off + fan_out]
        off += fan_out
        layers.append((w, b))
    return layers


def flatten(layers) -> np.ndarray:
    return np.concatenate([np.concatenate([w.ravel(), b]) for w, b in layers])


def _check_batch(spec, x, y):
    x = np.atleast_2d(np.asarray(x, dtype=np.float64))
    if x.shape[1] != spec.layer_sizes[0]:
        raise ShapeError(f"inputs have {x.shape[1]} features, spec wants {spec.layer_sizes[0]}")
    if spec.head == SOFTMAX:
        y = np.asarray(y, dtype=np.int64).ravel()
        if y.min(initial=0) < 0 or y.max(initial=0) >= spec.layer_sizes[-1]:
            raise ShapeError("class index out of range")
    else:
        y = np.asarray(y, dtype=np.float64)
        if y.ndim == 1:
            y = y[:, None]
        if y.shape[1] != spec.layer_sizes[-1]:
            raise ShapeError(f"targets have {y.shape[1]} dims, spec wants {spec.layer_sizes[-1]}")
    if x.shape[0] != y.shape[0]:
        raise ShapeError("inputs and targets disagree on example count")
    return x, y


def _forward_pass(spec, theta, x):
    """Returns (activations per layer, outputs). Hidden layers tanh; the head
    is softmax (stable, max-subtracted) or identity."""
    layers = unflatten(spec, theta)
    a = x
    acts = [a]
    for i, (w, b) in enumerate(layers):
        z = a @ w + b
        if i < len(layers) - 1:
            a = np.tanh(z)
        elif spec.head == SOFTMAX:
            z = z - z.max(axis=1, keepdims=True)
            e = np.exp(z)
            a = e / e.sum(axis=1, keepdims=True)
        else:
            a = z
        acts.append(a)
    if not np.all(np.isfinite(a)):
        raise NumericalFailureError("non-finite activation in forward pass",
                                    {"layer": len(layers)})
    return acts, a


def forward(spec: NetworkSpec, theta: np.ndarray, x) -> np.ndarray:
    """Per-example network outputs (probabilities or raw regression values)."""
    x = np.atleast_2d(np.asarray(x, dtype=np.float64))
    if x.shape[1] != spec.layer_sizes[0]:
        raise ShapeError(f"inputs have {x.shape[1]} features, spec wants {spec.layer_sizes[0]}")
    _, out = _forward_pass(spec, theta, x)
    return out


def loss(spec: NetworkSpec, theta: np.ndarray, x, y) -> float:
    """Batch-mean loss only (no gradient, not counted as a gradient eval)."""
    x, y = _check_batch(spec, x, y)
    _, out = _forward_pass(spec, theta, x)
    return _loss_from_outputs(spec, out, y)


def _loss_from_outputs(spec, out, y):
    n = out.shape[0]
    if spec.head == SOFTMAX:
        p = np.clip(out[np.arange(n), y], CROSS_ENTROPY_FLOOR, None)
        return float(-np.mean(np.log(p)))
    return float(np.mean((out - y) ** 2))


def loss_and_gradient(spec: NetworkSpec, theta: np.ndarray, x, y,
                      counter: GradEvalCounter = None):
    """Batch-mean loss and its exact gradient w.r.t. the flat parameters.

    Cross-entropy is fused with softmax in the backward pass, so the logit
    gradient is (p - onehot)/n regardless of the clamp used for the loss
    value. Increments `counter` by the batch size.
    """
    x, y = _check_batch(spec, x, y)
    acts, out = _forward_pass(spec, theta, x)
    n = x.shape[0]
    value = _loss_from_outputs(spec, out, y)

    if spec.head == SOFTMAX:
        dz = out.copy()
        dz[np.arange(n), y] -= 1.0
        dz /= n
    else:
        dz = 2.0 * (out - y) / (n * y.shape[1])

    layers = unflatten(spec, theta)
    grads = [None] * len(layers)
    for i in range(len(layers) - 1, -1, -1):
        a_prev = acts[i]
        grads[i] = (a_prev.T @ dz, dz.sum(axis=0))
        if i > 0:
            da = dz @ layers[i][0].T
            dz = da * (1.0 - acts[i] ** 2)  # tanh'
    grad = flatten(grads)
    if not np.all(np.isfinite(grad)) or not np.isfinite(value):
        raise NumericalFailureError("non-finite loss or gradient", {"loss": value})
    if counter is not None:
        counter.add(n)
    return value, grad


def accuracy(spec: NetworkSpec, theta: np.ndarray, x, y) -> float:
    """Fraction of argmax-correct examples; argmax ties resolve to the lowest
    class index."""
    if spec.head != SOFTMAX:
        raise ValueError("accuracy is only defined for the classification head")
    x, y = _check_batch(spec, x, y)
    out = forward(spec, theta, x)
    return float(np.mean(out.argmax(axis=1) == y))

"""Dense vector geometry for the level-set walk: projection, rejection,
normalization, and angles between gradient directions.

All functions operate on 1-D float64 numpy arrays and are pure.
"""

import numpy as np

# Norms below this are numerically indistinguishable from zero for the
# purpose of forming a unit vector.
DEGENERATE_NORM = 1e-30


class DegenerateDirectionError(ValueError):
    """Raised when a direction with (near-)zero norm is used where a unit
    vector is required."""


def _as_vector(v) -> np.ndarray:
    a = np.asarray(v, dtype=np.float64)
    if a.ndim != 1 or a.size == 0:
        raise ValueError(f"expected a non-empty 1-D vector, got shape {a.shape}")
    return a


def normalize(v) -> np.ndarray:
    """Unit vector along v."""
    v = _as_vector(v)
    n = np.linalg.norm(v)
    if n < DEGENERATE_NORM:
        raise DegenerateDirectionError("cannot normalize a zero-norm vector")
    return v / n


def project(a, b) -> np.ndarray:
    """Component of a along b: (a . b_hat) b_hat."""
    a = _as_vector(a)
    b_hat = normalize(b)
    if a.shape != b_hat.shape:
        raise ValueError(f"dimension mismatch: {a.shape} vs {b_hat.shape}")
    return (a @ b_hat) * b_hat


def reject(a, b) -> np.ndarray:
    """Component of a orthogonal to b: a - project(a, b)."""
    a = _as_vector(a)
    return a - project(a, b)


def angle_degrees(a, b) -> float:
    """Angle between a and b in degrees, in [0, 180].

    The cosine is clamped to [-1, 1] so floating-point overshoot cannot
    produce an arccos domain error.
    """
    a_hat = normalize(a)
    b_hat = normalize(b)
    if a_hat.shape != b_hat.shape:
        raise ValueError(f"dimension mismatch: {a_hat.shape} vs {b_hat.shape}")
    cos = float(np.clip(a_hat @ b_hat, -1.0, 1.0))
    return float(np.degrees(np.arccos(cos)))

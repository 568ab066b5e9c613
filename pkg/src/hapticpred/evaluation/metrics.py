"""Error metrics on the 0..100 rating scale."""
from __future__ import annotations

import numpy as np

from ..errors import ShapeError


def rescale_to_0_100(value):
    """Affine map from -100..100 to 0..100; values outside pass through unclamped."""
    return (np.asarray(value, dtype=np.float64) + 100.0) / 2.0


def _pair(y, y_hat):
    y = np.asarray(y, dtype=np.float64).reshape(-1)
    y_hat = np.asarray(y_hat, dtype=np.float64).reshape(-1)
    if y.shape != y_hat.shape:
        raise ShapeError(f"length mismatch: {y.size} vs {y_hat.size}")
    if y.size == 0:
        raise ShapeError("metrics need at least one value")
    return y, y_hat


def mae(y, y_hat) -> float:
    y, y_hat = _pair(y, y_hat)
    return float(np.mean(np.abs(y - y_hat)))


def rmse(y, y_hat) -> float:
    y, y_hat = _pair(y, y_hat)
    d = y - y_hat
    return float(np.sqrt(np.mean(d * d)))

"""Goodness-of-fit metrics: RMSE/MAE, GEH and the Pearson correlation.

Sums go through ``numpy.sum``, which uses pairwise summation on
contiguous float64 data.
"""
from __future__ import annotations

import math

import numpy as np

from .errors import ShapeMismatchError, UndefinedMetricError, ValidationError

GEH_THRESHOLD = 4.0
CC_THRESHOLD = 0.85


def _paired(observed, predicted, min_len=1):
    y = np.ascontiguousarray(observed, dtype=float).ravel()
    x = np.ascontiguousarray(predicted, dtype=float).ravel()
    if y.shape != x.shape:
        raise ShapeMismatchError(f"length mismatch: {y.size} vs {x.size}")
    if y.size < min_len:
        raise ValidationError(f"need at least {min_len} paired samples, got {y.size}")
    if not (np.all(np.isfinite(y)) and np.all(np.isfinite(x))):
        raise ValidationError("samples must be finite")
    return y, x


def rmse_mae(observed, predicted) -> tuple[float, float]:
    """Root-mean-square and mean absolute error between two vectors."""
    y, x = _paired(observed, predicted)
    d = y - x
    n = d.size
    rmse = math.sqrt(float(np.sum(d * d)) / n)
    mae = float(np.sum(np.abs(d))) / n
    return rmse, mae


def rmse(observed, predicted) -> float:
    return rmse_mae(observed, predicted)[0]


def mae(observed, predicted) -> float:
    return rmse_mae(observed, predicted)[1]


def geh(v_obs: float, v_sim: float) -> float:
    """GEH statistic ``sqrt(2 (V_obs - V_sim)^2 / (V_obs + V_sim))``.

    Values below :data:`GEH_THRESHOLD` indicate an acceptable volume match.
    """
    v_obs, v_sim = float(v_obs), float(v_sim)
    if not (math.isfinite(v_obs) and math.isfinite(v_sim)):
        raise ValidationError("volumes must be finite")
    if v_obs < 0 or v_sim < 0:
        raise ValidationError(f"volumes must be nonnegative, got {v_obs}, {v_sim}")
    total = v_obs + v_sim
    if total == 0.0:
        raise UndefinedMetricError("GEH is undefined when both volumes are zero")
    # same value as sqrt(2 d^2 / total) without squaring tiny differences
    return math.sqrt(2.0) * abs(v_obs - v_sim) / math.sqrt(total)


def pearson_cc(observed, simulated) -> float:
    """Pearson linear correlation coefficient, clipped to ``[-1, 1]``."""
    y, x = _paired(observed, simulated, min_len=2)
    dy = y - np.sum(y) / y.size
    dx = x - np.sum(x) / x.size
    syy = float(np.sum(dy * dy))
    sxx = float(np.sum(dx * dx))
    if syy == 0.0 or sxx == 0.0:
        raise UndefinedMetricError("correlation undefined for a constant vector")
    r = float(np.sum(dy * dx)) / (math.sqrt(syy) * math.sqrt(sxx))
    return min(1.0, max(-1.0, r))

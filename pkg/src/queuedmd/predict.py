"""Open-loop rollout of identified models, error series and spectral checks."""
from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np

from . import linalg, metrics
from .errors import CoverageError, ShapeMismatchError
from .snapshots import ControlSequence
from .sysid import LinearModel

UNSTABLE_MARGIN = 1e-8


class InstabilityWarning(RuntimeWarning):
    """An open-loop rollout overflowed because the model is unstable."""


@dataclass(frozen=True)
class PredictionResult:
    predicted: np.ndarray
    start_index: int
    h_used: int
    final_state: np.ndarray
    overflow_columns: tuple = field(default=())

    @property
    def steps(self) -> int:
        return self.predicted.shape[1]

    def history(self) -> np.ndarray:
        """The last ``h`` predicted states as an ``n x h`` history matrix.

        Feeding this back to :func:`rollout` continues the prediction exactly.
        """
        n = self.predicted.shape[0]
        return self.final_state.reshape(self.h_used, n).T


@dataclass(frozen=True)
class ErrorSeries:
    errors: np.ndarray
    per_state_mae: np.ndarray
    per_state_rmse: np.ndarray
    aggregate_mae: float
    aggregate_rmse: float


@dataclass(frozen=True)
class StabilityReport:
    eigenvalues: np.ndarray
    magnitudes: np.ndarray
    n_unstable: int

    @property
    def stable(self) -> bool:
        return self.n_unstable == 0

    @property
    def spectral_radius(self) -> float:
        return float(self.magnitudes[0]) if self.magnitudes.size else 0.0


def _control_matrix(controls):
    if isinstance(controls, ControlSequence):
        return controls.values
    return np.atleast_2d(np.asarray(controls, dtype=float))


def rollout(
    model: LinearModel,
    history,
    controls,
    steps: int,
    start_index: int = 0,
) -> PredictionResult:
    """Predict ``steps`` future states by iterating the model open loop.

    Parameters
    ----------
    model : LinearModel
        Identified model of depth ``h``.
    history : array, shape (n, h)
        The ``h`` most recent true states, oldest first.
    controls : ControlSequence or array, shape (q, >= steps + h - 1)
        Known control plan. Column 0 is the control applied at the oldest
        history state; column ``h - 1 + k`` is the control in force when
        predicting step ``k``.
    steps : int
        Prediction horizon.
    start_index : int
        Time index of the first predicted column (bookkeeping only).

    Returns
    -------
    PredictionResult
        ``predicted[:, k]`` is the newest block of the stacked state after
        ``k + 1`` updates. Columns that overflow are listed in
        ``overflow_columns`` and an :class:`InstabilityWarning` is issued.
    """
    h, n, q = model.h, model.n, model.q
    hist = np.atleast_2d(np.asarray(history, dtype=float))
    if hist.shape != (n, h):
        raise CoverageError(f"history must be {n} x {h} (n x h), got {hist.shape[0]} x {hist.shape[1]}")
    u = _control_matrix(controls)
    if u.shape[0] != q:
        raise ShapeMismatchError(f"model expects {q} control inputs, got {u.shape[0]}")
    if steps < 0:
        raise CoverageError("steps must be nonnegative")
    need = steps + h - 1
    if u.shape[1] < need:
        raise CoverageError(f"controls cover {u.shape[1]} steps but {need} are needed")

    a, b = model.a, model.b
    z = hist.T.reshape(-1)
    # stacked control windows: column k = u[:, k], ..., u[:, k+h-1]
    if steps:
        w_all = np.vstack([u[:, j:j + steps] for j in range(h)])
    out = np.empty((n, steps))
    with np.errstate(over="ignore", invalid="ignore"):
        for k in range(steps):
            z = a @ z + b @ w_all[:, k]
            out[:, k] = z[-n:]
    bad = tuple(int(k) for k in np.flatnonzero(~np.all(np.isfinite(out), axis=0)))
    if bad:
        warnings.warn(
            f"rollout overflowed from step {bad[0]} on ({len(bad)} of {steps} columns non-finite)",
            InstabilityWarning,
            stacklevel=2,
        )
    out.setflags(write=False)
    return PredictionResult(out, int(start_index), h, z.copy(), bad)


def error_series(actual, result) -> ErrorSeries:
    """Errors ``actual - predicted`` with per-state and aggregate MAE/RMSE.

    Aggregates average over every state and step together.
    """
    pred = result.predicted if isinstance(result, PredictionResult) else np.asarray(result, float)
    act = np.atleast_2d(np.asarray(actual, dtype=float))
    pred = np.atleast_2d(pred)
    if act.shape != pred.shape:
        raise ShapeMismatchError(f"actual has shape {act.shape}, predicted has {pred.shape}")
    err = act - pred
    per_mae = np.mean(np.abs(err), axis=1)
    per_rmse = np.sqrt(np.mean(err**2, axis=1))
    rmse, mae = metrics.rmse_mae(act.ravel(), pred.ravel())
    return ErrorSeries(err, per_mae, per_rmse, mae, rmse)


def spectral_stability(model: LinearModel) -> StabilityReport:
    """Eigenvalue magnitudes of ``model.a`` and the count outside the unit circle."""
    w = linalg.eigvals(model.a)
    mags = np.abs(w)
    return StabilityReport(w, mags, int(np.count_nonzero(mags > 1.0 + UNSTABLE_MARGIN)))


def dominant_period(series, min_lag: int = 2) -> int | None:
    """Lag of the strongest autocorrelation peak of a 1-D series.

    Uses the biased autocorrelation of the demeaned series and only looks
    beyond its first zero crossing, so the trivial peak at lag 0 and
    slow-decay shoulders are skipped. Returns ``None`` for series without
    any oscillation (constant, or no crossing).
    """
    x = np.asarray(series, dtype=float).ravel()
    if x.size < 4 or not np.all(np.isfinite(x)):
        return None
    x = x - x.mean()
    denom = float(np.dot(x, x))
    if denom <= 0.0:
        return None
    n = x.size
    spec = np.fft.rfft(x, 2 * n)
    acf = np.fft.irfft(spec * np.conj(spec))[:n] / denom
    below = np.flatnonzero(acf[1:] < 0.0)
    if below.size == 0:
        return None
    lo = max(min_lag, int(below[0]) + 1)
    if lo >= n - 1:
        return None
    return int(lo + np.argmax(acf[lo:n - 1]))

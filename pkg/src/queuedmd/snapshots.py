"""Snapshot matrices and time-delay (Hankel) embedding.

Columns are time. ``values[:, k]`` is the state vector at second ``k``;
all indices are 0-based.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import (
    EmbeddingError,
    NumericInputError,
    ShapeMismatchError,
    ValidationError,
    WindowRangeError,
)


def _frozen(a, dtype=float):
    a = np.array(a, dtype=dtype, copy=True, order="C")
    if a.ndim == 1:
        a = a[np.newaxis, :]
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class TimeSeries:
    """Uniformly sampled multivariate series, one column per time step."""

    values: np.ndarray
    dt_seconds: float = 1.0

    def __post_init__(self):
        v = _frozen(self.values)
        if v.ndim != 2 or v.shape[0] < 1 or v.shape[1] < 1:
            raise ValidationError(f"series must be a non-empty 2-D matrix, got shape {v.shape}")
        if not np.all(np.isfinite(v)):
            raise NumericInputError("series contains non-finite values")
        if not self.dt_seconds > 0:
            raise ValidationError("dt_seconds must be positive")
        object.__setattr__(self, "values", v)

    @property
    def n_states(self) -> int:
        return self.values.shape[0]

    @property
    def n_steps(self) -> int:
        return self.values.shape[1]


@dataclass(frozen=True)
class ControlSequence:
    """Binary control matrix, one column per time step."""

    values: np.ndarray

    def __post_init__(self):
        v = _frozen(self.values)
        if v.ndim != 2 or v.shape[0] < 1 or v.shape[1] < 1:
            raise ValidationError(f"controls must be a non-empty 2-D matrix, got shape {v.shape}")
        bad = np.argwhere((v != 0.0) & (v != 1.0))
        if bad.size:
            i, j = bad[0]
            raise ValidationError(
                f"control entries must be 0 or 1; found {v[i, j]!r} at input {i}, step {j}"
                f" ({len(bad)} offending entries)"
            )
        object.__setattr__(self, "values", v)

    @property
    def n_inputs(self) -> int:
        return self.values.shape[0]

    @property
    def n_steps(self) -> int:
        return self.values.shape[1]


@dataclass(frozen=True)
class SnapshotPair:
    """Paired snapshot matrices; ``x_prime[:, j]`` succeeds ``x[:, j]``."""

    x: np.ndarray
    x_prime: np.ndarray

    def __post_init__(self):
        x, xp = _frozen(self.x), _frozen(self.x_prime)
        if x.shape != xp.shape:
            raise ShapeMismatchError(f"x has shape {x.shape} but x_prime has {xp.shape}")
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "x_prime", xp)

    @property
    def n_columns(self) -> int:
        return self.x.shape[1]


@dataclass(frozen=True)
class HankelPair:
    """Delay-embedded states, shifted states and controls of depth ``h``."""

    h: int
    x_tilde: np.ndarray
    x_prime_tilde: np.ndarray
    upsilon_tilde: np.ndarray

    @property
    def c(self) -> int:
        return self.x_tilde.shape[1]


def build_snapshot_pair(series: TimeSeries, start: int, count: int) -> SnapshotPair:
    """Slice ``count`` consecutive columns and their one-step successors.

    ``x`` holds columns ``start .. start+count-1`` and ``x_prime`` holds
    ``start+1 .. start+count``.
    """
    if start < 0:
        raise WindowRangeError(f"start={start} is negative")
    if count < 1:
        raise WindowRangeError(f"count={count} must be at least 1")
    if start + count + 1 > series.n_steps:
        raise WindowRangeError(
            f"start + count + 1 = {start + count + 1} exceeds n_steps = {series.n_steps}"
        )
    v = series.values
    return SnapshotPair(v[:, start:start + count], v[:, start + 1:start + count + 1])


def hankel_embed(matrix, h: int) -> np.ndarray:
    """Stack ``h`` column-shifted copies of ``matrix`` vertically.

    Column ``j`` of the result is ``matrix[:, j], matrix[:, j+1], ...,
    matrix[:, j+h-1]`` stacked top to bottom, so the output has shape
    ``(h*n, m-h+1)``.

    Examples
    --------
    >>> hankel_embed(np.array([[1, 2, 3, 4]]), 2)
    array([[1, 2, 3],
           [2, 3, 4]])
    """
    m_arr = np.asarray(matrix)
    if m_arr.ndim == 1:
        m_arr = m_arr[np.newaxis, :]
    if m_arr.ndim != 2:
        raise ValidationError(f"expected a 2-D matrix, got {m_arr.ndim}-D")
    if int(h) != h or h < 1:
        raise ValidationError(f"embedding depth h must be an integer >= 1, got {h!r}")
    h = int(h)
    m = m_arr.shape[1]
    if h > m:
        raise EmbeddingError(f"embedding depth h={h} exceeds column count m={m}")
    c = m - h + 1
    return np.vstack([m_arr[:, b:b + c] for b in range(h)])


def build_hankel_pair(
    series: TimeSeries,
    controls: ControlSequence,
    h: int,
    train_window: int,
    start: int = 0,
) -> HankelPair:
    """Embed a training window of ``train_window`` snapshots at depth ``h``.

    Uses state columns ``start .. start+m`` (``m+1`` columns) and control
    columns ``start .. start+m-1``. Each output has ``m-h+1`` columns.
    """
    if series.n_steps != controls.n_steps:
        raise ShapeMismatchError(
            f"series has {series.n_steps} steps but controls have {controls.n_steps}"
        )
    m = int(train_window)
    if m < 1:
        raise WindowRangeError(f"train_window={m} must be at least 1")
    if start < 0 or start + m + 1 > series.n_steps:
        raise WindowRangeError(
            f"start + train_window + 1 = {start + m + 1} exceeds n_steps = {series.n_steps}"
        )
    if h > m:
        raise EmbeddingError(f"embedding depth h={h} exceeds training window m={m}")
    x = series.values[:, start:start + m + 1]
    u = controls.values[:, start:start + m]
    out = [hankel_embed(x[:, :m], h), hankel_embed(x[:, 1:], h), hankel_embed(u, h)]
    for a in out:
        a.setflags(write=False)
    return HankelPair(int(h), *out)

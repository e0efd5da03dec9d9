"""Linear model identification from snapshot data: DMD, DMDc and Hankel DMDc."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import linalg
from .errors import DegenerateRankError, ShapeMismatchError
from .snapshots import ControlSequence, SnapshotPair, TimeSeries, build_hankel_pair


@dataclass(frozen=True)
class LinearModel:
    """Identified ``z[k+1] = a @ z[k] + b @ w[k]``.

    With delay depth ``h`` the stacked state ``z`` holds ``h`` consecutive
    raw states (oldest block first) and ``w`` the matching ``h`` controls,
    so ``a`` is ``(h*n, h*n)`` and ``b`` is ``(h*n, h*q)``.
    """

    a: np.ndarray
    b: np.ndarray
    h: int
    n: int
    q: int
    rank_used: int
    training_columns: int

    def __post_init__(self):
        a = np.array(self.a, dtype=float)
        b = np.array(self.b, dtype=float)
        n_eff, q_eff = self.h * self.n, self.h * self.q
        if a.shape != (n_eff, n_eff):
            raise ShapeMismatchError(f"a has shape {a.shape}, expected {(n_eff, n_eff)}")
        if b.shape != (n_eff, q_eff):
            raise ShapeMismatchError(f"b has shape {b.shape}, expected {(n_eff, q_eff)}")
        a.setflags(write=False)
        b.setflags(write=False)
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)

    @property
    def n_eff(self) -> int:
        return self.h * self.n

    @property
    def q_eff(self) -> int:
        return self.h * self.q


@dataclass(frozen=True)
class DmdResult:
    a_tilde: np.ndarray
    eigenvalues: np.ndarray
    modes: np.ndarray
    rank_used: int


def dmd(pair: SnapshotPair, rank_spec=linalg.AUTO) -> DmdResult:
    """Exact DMD of a snapshot pair.

    The reduced operator is the projection of the best-fit ``A`` onto the
    leading left singular vectors of ``X``::

        A_tilde = U_r^T X' V_r S_r^{-1}
        Phi     = X' V_r S_r^{-1} W

    where ``W`` are the eigenvectors of ``A_tilde``.
    """
    factors = linalg.truncate(linalg.svd(pair.x), rank_spec)
    y = pair.x_prime @ (factors.v / factors.sigma)
    a_tilde = factors.u.T @ y
    pairs = linalg.eig(a_tilde)
    modes = y @ pairs.eigenvectors
    return DmdResult(a_tilde, pairs.eigenvalues, modes, factors.r)


def _fit_ab(x, x_prime, upsilon, rank_spec):
    # least-squares [A B] = X' pinv([X; U]) via a truncated SVD of the stacked data
    n = x.shape[0]
    omega = np.vstack([x, upsilon])
    if not np.any(omega):
        raise DegenerateRankError("state and control data are identically zero")
    factors = linalg.truncate(linalg.svd(omega), rank_spec)
    core = x_prime @ (factors.v / factors.sigma)
    a = core @ factors.u[:n].T
    b = core @ factors.u[n:].T
    return a, b, factors.r


def dmdc(pair: SnapshotPair, controls, rank_spec=linalg.AUTO) -> LinearModel:
    """DMD with control on one-step snapshot pairs.

    ``controls`` is a :class:`ControlSequence` (or plain matrix) with one
    column per column of ``pair``. Input directions never excited by the
    data receive zero columns in ``b`` (minimum-norm solution).
    """
    u = controls.values if isinstance(controls, ControlSequence) else np.atleast_2d(np.asarray(controls, float))
    if u.shape[1] != pair.n_columns:
        raise ShapeMismatchError(
            f"controls have {u.shape[1]} columns but the snapshot pair has {pair.n_columns}"
        )
    a, b, r = _fit_ab(pair.x, pair.x_prime, u, rank_spec)
    return LinearModel(a, b, 1, pair.x.shape[0], u.shape[0], r, pair.n_columns)


def hdmdc(
    series: TimeSeries,
    controls: ControlSequence,
    h: int,
    train_window: int,
    rank_spec=linalg.AUTO,
    start: int = 0,
) -> LinearModel:
    """Hankel DMDc: DMDc on ``h``-deep delay embeddings of a training window.

    The full ``h*n``-dimensional model is returned; the upper blocks encode
    the delay shift and the last ``n`` rows carry the physics (see
    :func:`extract_current_block`). ``h=1`` reproduces :func:`dmdc`.
    """
    hp = build_hankel_pair(series, controls, h, train_window, start=start)
    a, b, r = _fit_ab(hp.x_tilde, hp.x_prime_tilde, hp.upsilon_tilde, rank_spec)
    return LinearModel(a, b, hp.h, series.n_states, controls.n_inputs, r, hp.c)


def extract_current_block(model: LinearModel) -> tuple[np.ndarray, np.ndarray]:
    """Rows of ``a`` and ``b`` that produce the newest state block."""
    n = model.n
    return model.a[-n:, :], model.b[-n:, :]

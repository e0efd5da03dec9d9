"""Dense linear-algebra primitives: thin SVD, rank truncation, pseudoinverse, eig.

The factorizations themselves are delegated to LAPACK through numpy/scipy;
this module fixes the conventions the rest of the package relies on
(thin factors, ordering, rank selection, error types).

A *rank spec* is one of

* ``"auto"`` (or ``None``): keep ``sigma_i > eps * sigma_1 * max(n, m)``,
* an ``int`` ``r >= 1``: keep exactly the first ``r`` singular values,
* a ``float`` in ``(0, 1]``: keep the shortest prefix whose cumulative
  energy ``sum(sigma_i**2)`` reaches that fraction of the total.
"""
from __future__ import annotations

from dataclasses import dataclass
from numbers import Integral, Real

import numpy as np
import scipy.linalg

from .errors import ConvergenceError, DegenerateRankError, NumericInputError, ValidationError

AUTO = "auto"


@dataclass(frozen=True)
class SvdFactors:
    u: np.ndarray
    sigma: np.ndarray
    v: np.ndarray

    @property
    def r(self) -> int:
        return self.sigma.shape[0]

    @property
    def shape(self) -> tuple[int, int]:
        """Shape of the factored matrix."""
        return self.u.shape[0], self.v.shape[0]

    def reconstruct(self) -> np.ndarray:
        return (self.u * self.sigma) @ self.v.T


@dataclass(frozen=True)
class EigenPairs:
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray


def _check_finite(a, what="matrix"):
    a = np.asarray(a, dtype=float)
    if a.ndim != 2:
        raise ValidationError(f"{what} must be 2-D, got {a.ndim}-D")
    if not np.all(np.isfinite(a)):
        raise NumericInputError(f"{what} contains non-finite entries")
    return a


def svd(matrix) -> SvdFactors:
    """Thin SVD ``matrix = u @ diag(sigma) @ v.T`` with ``r = min(n, m)``."""
    a = _check_finite(matrix)
    if a.size == 0:
        raise ValidationError(f"cannot factor an empty matrix of shape {a.shape}")
    try:
        u, s, vt = np.linalg.svd(a, full_matrices=False)
    except np.linalg.LinAlgError:
        # gesdd occasionally fails where the slower QR-iteration driver converges
        try:
            u, s, vt = scipy.linalg.svd(a, full_matrices=False, lapack_driver="gesvd")
        except np.linalg.LinAlgError as exc:
            raise ConvergenceError(f"SVD did not converge: {exc}") from exc
    return SvdFactors(u, s, vt.T)


def parse_rank_spec(text):
    """Parse a rank spec from its textual form (``auto``, ``12``, ``0.99``)."""
    if text is None:
        return AUTO
    if not isinstance(text, str):
        return text
    t = text.strip().lower()
    if t in ("auto", "automatic", ""):
        return AUTO
    try:
        return int(t)
    except ValueError:
        pass
    try:
        return float(t)
    except ValueError:
        raise ValidationError(f"unrecognised rank spec {text!r}") from None


def select_rank(sigma, rank_spec=AUTO, shape=None) -> int:
    """Number of leading singular values retained under ``rank_spec``."""
    sigma = np.asarray(sigma, dtype=float)
    k = sigma.shape[0]
    if rank_spec is None or (isinstance(rank_spec, str) and rank_spec.lower() in ("auto", "automatic")):
        if k == 0 or sigma[0] <= 0.0:
            return 0
        n, m = shape if shape is not None else (k, k)
        tol = np.finfo(float).eps * sigma[0] * max(n, m)
        return int(np.count_nonzero(sigma > tol))
    if isinstance(rank_spec, bool):
        raise ValidationError("rank spec may not be a bool")
    if isinstance(rank_spec, Integral):
        r = int(rank_spec)
        if r < 1 or r > k:
            raise ValidationError(f"requested rank {r} outside 1..{k}")
        return r
    if isinstance(rank_spec, Real):
        frac = float(rank_spec)
        if not 0.0 < frac <= 1.0:
            raise ValidationError(f"energy threshold must lie in (0, 1], got {frac}")
        energy = np.cumsum(sigma**2)
        if energy[-1] <= 0.0:
            return 0
        return int(min(np.searchsorted(energy / energy[-1], frac) + 1, k))
    raise ValidationError(f"unrecognised rank spec {rank_spec!r}")


def truncate(factors: SvdFactors, rank_spec=AUTO) -> SvdFactors:
    """Keep the leading ``r`` singular triplets selected by ``rank_spec``."""
    r = select_rank(factors.sigma, rank_spec, factors.shape)
    if r == 0:
        raise DegenerateRankError("no singular value survives truncation (zero matrix?)")
    return SvdFactors(factors.u[:, :r], factors.sigma[:r], factors.v[:, :r])


def pinv(matrix, truncation=AUTO) -> np.ndarray:
    """Moore-Penrose pseudoinverse ``V diag(1/sigma) U^T`` over the retained rank.

    A matrix whose every singular value is discarded (e.g. all zeros) has the
    zero matrix of transposed shape as its pseudoinverse.
    """
    f = svd(matrix)
    r = select_rank(f.sigma, truncation, f.shape)
    # exact zeros cannot be inverted even when an explicit rank asks for them
    r = min(r, int(np.count_nonzero(f.sigma > 0.0)))
    if r == 0:
        return np.zeros(f.shape[::-1])
    return (f.v[:, :r] / f.sigma[:r]) @ f.u[:, :r].T


def _sort_order(w):
    # nonincreasing magnitude; ties broken by real then imaginary part for determinism
    return np.lexsort((-w.imag, -w.real, -np.abs(w)))


def eig(matrix) -> EigenPairs:
    """Eigenpairs of a real square matrix, sorted by nonincreasing ``|lambda|``.

    Eigenvectors have unit 2-norm. For a real input the complex eigenvalues
    come in exact conjugate pairs.
    """
    a = _check_finite(matrix)
    if a.shape[0] != a.shape[1]:
        raise ValidationError(f"eig needs a square matrix, got {a.shape}")
    try:
        w, vecs = np.linalg.eig(a)
    except np.linalg.LinAlgError as exc:
        raise ConvergenceError(f"eigenvalue iteration did not converge: {exc}") from exc
    w = w.astype(complex)
    vecs = vecs.astype(complex)
    idx = _sort_order(w)
    return EigenPairs(w[idx], vecs[:, idx])


def eigvals(matrix) -> np.ndarray:
    """Eigenvalues only, same ordering as :func:`eig`."""
    a = _check_finite(matrix)
    if a.shape[0] != a.shape[1]:
        raise ValidationError(f"eigvals needs a square matrix, got {a.shape}")
    try:
        w = np.linalg.eigvals(a).astype(complex)
    except np.linalg.LinAlgError as exc:
        raise ConvergenceError(f"eigenvalue iteration did not converge: {exc}") from exc
    return w[_sort_order(w)]

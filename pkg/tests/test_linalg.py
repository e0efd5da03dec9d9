import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from queuedmd import linalg
from queuedmd.errors import DegenerateRankError, NumericInputError, ValidationError

REL = 1e-10


def _fro(a):
    return np.linalg.norm(a, "fro")


def penrose_residuals(m, p):
    return (
        _fro(m @ p @ m - m),
        _fro(p @ m @ p - p),
        _fro((m @ p).T - m @ p),
        _fro((p @ m).T - p @ m),
    )


# -- svd ---------------------------------------------------------------------

def test_svd_identity():
    np.testing.assert_allclose(linalg.svd(np.eye(2)).sigma, [1.0, 1.0])


def test_svd_diagonal():
    np.testing.assert_allclose(linalg.svd(np.diag([3.0, 1.0])).sigma, [3.0, 1.0])


def test_svd_rank_one():
    m = np.ones((2, 2))
    # oracle: square roots of the eigenvalues of M^T M = [[2,2],[2,2]] -> {4, 0}
    oracle = np.sqrt(np.clip(np.sort(np.linalg.eigvalsh(m.T @ m))[::-1], 0, None))
    np.testing.assert_allclose(oracle, [2.0, 0.0], atol=1e-15)
    np.testing.assert_allclose(linalg.svd(m).sigma, [2.0, 0.0], atol=1e-15)


def test_svd_rejects_non_finite():
    with pytest.raises(NumericInputError):
        linalg.svd(np.array([[1.0, np.inf]]))


@pytest.mark.parametrize("shape", [(5, 3), (3, 5), (1, 7), (40, 40)])
def test_svd_invariants(rng, shape):
    m = rng.standard_normal(shape)
    f = linalg.svd(m)
    assert f.r == min(shape)
    assert _fro(m - f.reconstruct()) <= REL * (1 + _fro(m))
    assert _fro(f.u.T @ f.u - np.eye(f.r)) <= REL
    assert _fro(f.v.T @ f.v - np.eye(f.r)) <= REL
    assert np.all(np.diff(f.sigma) <= 0) and f.sigma[-1] >= 0


# -- truncate ---------------------------------------------------------------

def _factors(sigma, n=None, m=None):
    k = len(sigma)
    n = n or k
    m = m or k
    return linalg.SvdFactors(np.eye(n, k), np.asarray(sigma, float), np.eye(m, k))


def test_truncate_exact():
    np.testing.assert_array_equal(linalg.truncate(_factors([3.0, 1.0]), 1).sigma, [3.0])


def test_truncate_auto_drops_machine_noise():
    assert linalg.truncate(_factors([5.0, 5e-18]), "auto").r == 1


def test_truncate_energy():
    # cumulative energy 16, 20, 21 of 21: the first prefix reaching 0.9 is [4, 2]
    np.testing.assert_array_equal(linalg.truncate(_factors([4.0, 2.0, 1.0]), 0.9).sigma, [4.0, 2.0])
    assert linalg.truncate(_factors([4.0, 2.0, 1.0]), 16 / 21).r == 1
    assert linalg.truncate(_factors([4.0, 2.0, 1.0]), 1.0).r == 3


def test_truncate_zero_matrix_is_degenerate():
    with pytest.raises(DegenerateRankError):
        linalg.truncate(linalg.svd(np.zeros((3, 2))), "auto")


def test_truncate_rank_too_large():
    with pytest.raises(ValidationError):
        linalg.truncate(_factors([3.0, 1.0]), 3)


def test_parse_rank_spec():
    assert linalg.parse_rank_spec("auto") == "auto"
    assert linalg.parse_rank_spec("12") == 12
    assert linalg.parse_rank_spec("0.99") == 0.99
    with pytest.raises(ValidationError):
        linalg.parse_rank_spec("lots")


# -- pinv ---------------------------------------------------------------------

def test_pinv_identity():
    np.testing.assert_allclose(linalg.pinv(np.eye(3)), np.eye(3))


def test_pinv_zero():
    p = linalg.pinv(np.zeros((2, 3)))
    assert p.shape == (3, 2)
    assert not p.any()


def test_pinv_singular_diagonal():
    m = np.diag([2.0, 0.0])
    p = linalg.pinv(m)
    np.testing.assert_allclose(p, np.diag([0.5, 0.0]))
    assert max(penrose_residuals(m, p)) <= 1e-15


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 12), st.integers(1, 12), st.integers(0, 12), st.integers(0, 2**32 - 1),
       st.floats(-3, 3))
def test_pinv_penrose_conditions(n, m, rank, seed, log_scale):
    # random products of Gaussian factors: arbitrary rank, moderate conditioning
    g = np.random.default_rng(seed)
    k = min(rank, n, m)
    mat = 10.0**log_scale * (g.standard_normal((n, k)) @ g.standard_normal((k, m)))
    p = linalg.pinv(mat)
    tol = 1e-8 * (1 + _fro(mat))
    assert max(penrose_residuals(mat, p)) <= tol


def test_pinv_rank_deficient_random(rng):
    m = rng.standard_normal((30, 4)) @ rng.standard_normal((4, 20))
    p = linalg.pinv(m)
    assert max(penrose_residuals(m, p)) <= 1e-8 * (1 + _fro(m))


# -- eig ------------------------------------------------------------------------

def test_eig_diagonal():
    np.testing.assert_allclose(linalg.eig(np.diag([0.5, 0.9])).eigenvalues, [0.9, 0.5])


def test_eig_rotation():
    w = linalg.eig(np.array([[0.0, -1.0], [1.0, 0.0]])).eigenvalues
    np.testing.assert_allclose(sorted(w, key=lambda z: z.imag), [-1j, 1j], atol=1e-15)


def test_eig_triangular():
    np.testing.assert_allclose(linalg.eig(np.array([[0.9, 0.1], [0.0, 0.8]])).eigenvalues, [0.9, 0.8])


def test_eig_residual_and_conjugates(rng):
    a = rng.standard_normal((25, 25))
    pairs = linalg.eig(a)
    mags = np.abs(pairs.eigenvalues)
    assert np.all(np.diff(mags) <= 1e-12)
    for lam, v in zip(pairs.eigenvalues, pairs.eigenvectors.T):
        v = v / np.linalg.norm(v)
        assert np.linalg.norm(a @ v - lam * v) <= 1e-8 * _fro(a)
    w = pairs.eigenvalues
    for lam in w[np.abs(w.imag) > 0]:
        assert np.min(np.abs(w - np.conj(lam))) <= 1e-12


def test_eig_rejects_non_square():
    with pytest.raises(ValidationError):
        linalg.eig(np.zeros((2, 3)))

import numpy as np
import pytest

from conftest import linear_dataset, random_stable_system, simulate_linear
from queuedmd import predict, sysid
from queuedmd.errors import DegenerateRankError, ShapeMismatchError
from queuedmd.snapshots import ControlSequence, SnapshotPair, TimeSeries, build_hankel_pair, build_snapshot_pair


def _fro(a):
    return np.linalg.norm(a, "fro")


# -- plain DMD --------------------------------------------------------------

def test_dmd_scalar_geometric():
    x = 0.9 ** np.arange(4.0)
    res = sysid.dmd(SnapshotPair(x[:3], x[1:]))
    assert res.rank_used == 1
    assert abs(res.eigenvalues[0] - 0.9) <= 1e-10


def test_dmd_fixed_point_data(rng):
    x = rng.standard_normal((4, 6))
    res = sysid.dmd(SnapshotPair(x, x))
    np.testing.assert_allclose(res.eigenvalues, np.ones(4), atol=1e-10)


def test_dmd_diagonal_system():
    a = np.diag([0.9, -0.5])
    x = np.empty((2, 11))
    x[:, 0] = [1.0, 1.0]
    for k in range(10):
        x[:, k + 1] = a @ x[:, k]
    res = sysid.dmd(SnapshotPair(x[:, :10], x[:, 1:]))
    np.testing.assert_allclose(res.eigenvalues.real, [0.9, -0.5], atol=1e-10)
    np.testing.assert_allclose(res.eigenvalues.imag, 0.0, atol=1e-10)
    # the modes are eigenvectors of the full operator
    for lam, phi in zip(res.eigenvalues, res.modes.T):
        np.testing.assert_allclose(a @ phi, lam * phi, atol=1e-10)
    assert res.modes.shape == (2, 2)


def test_dmd_spectrum_random_system(rng):
    a, _ = random_stable_system(rng, 5, 1)
    x = simulate_linear(a, np.zeros((5, 1)), rng.standard_normal(5), np.zeros((1, 40)))
    res = sysid.dmd(SnapshotPair(x[:, :40], x[:, 1:]))
    true = np.linalg.eigvals(a)
    got = res.eigenvalues
    # match as multisets by greedy nearest assignment
    for lam in true:
        i = np.argmin(np.abs(got - lam))
        assert abs(got[i] - lam) <= 1e-6
        got = np.delete(got, i)


def test_dmd_degenerate():
    with pytest.raises(DegenerateRankError):
        sysid.dmd(SnapshotPair(np.zeros((2, 3)), np.zeros((2, 3))))


# -- DMDc -------------------------------------------------------------------

def test_dmdc_scalar_recovery():
    a, b = 0.5, 2.0
    u = np.array([[1.0, 0, 1, 0, 1, 0, 1, 0, 1]])
    x = [1.0]
    for k in range(9):
        x.append(a * x[-1] + b * u[0, k])
    x = np.array([x])
    model = sysid.dmdc(SnapshotPair(x[:, :9], x[:, 1:]), ControlSequence(u))
    assert abs(model.a[0, 0] - a) <= 1e-8
    assert abs(model.b[0, 0] - b) <= 1e-8
    assert model.h == 1 and model.rank_used == 2


def test_dmdc_unexcited_input_gets_zero_column():
    x = 0.9 ** np.arange(11.0)
    model = sysid.dmdc(SnapshotPair(x[:10], x[1:]), np.zeros((1, 10)))
    assert model.rank_used == 1
    assert abs(model.a[0, 0] - 0.9) <= 1e-12
    assert model.b[0, 0] == 0.0


def test_dmdc_two_state_recovery():
    a = np.diag([0.9, 0.5])
    b = np.array([[1.0], [0.0]])
    u = (np.arange(50) % 2).astype(float)[None, :]
    x = simulate_linear(a, b, np.array([1.0, 1.0]), u)
    model = sysid.dmdc(SnapshotPair(x[:, :50], x[:, 1:]), u)
    assert _fro(model.a - a) <= 1e-6
    assert _fro(model.b - b) <= 1e-6


def test_dmdc_column_mismatch():
    with pytest.raises(ShapeMismatchError):
        sysid.dmdc(SnapshotPair(np.ones((1, 4)), np.ones((1, 4))), np.ones((1, 3)))


def test_dmdc_zero_data():
    with pytest.raises(DegenerateRankError):
        sysid.dmdc(SnapshotPair(np.zeros((2, 5)), np.zeros((2, 5))), np.zeros((1, 5)))


@pytest.mark.parametrize("n, q", [(1, 1), (3, 2), (8, 8)])
def test_dmdc_exact_recovery_random(rng, n, q):
    a, b, s, u = linear_dataset(rng, n, q, 12 * (n + q))
    m = s.n_steps - 1
    model = sysid.dmdc(build_snapshot_pair(s, 0, m), u.values[:, :m])
    assert _fro(model.a - a) + _fro(model.b - b) <= 1e-6


def test_dmdc_residual_is_least_squares_minimum(rng):
    # data from a nonlinear map, so the residual is strictly positive
    x = np.empty((3, 61))
    x[:, 0] = [0.3, -0.2, 0.5]
    u = rng.integers(0, 2, (2, 60)).astype(float)
    for k in range(60):
        x[:, k + 1] = np.tanh(1.2 * x[::-1, k]) + 0.3 * u[0, k] - 0.1 * u[1, k] * x[0, k]
    pair = SnapshotPair(x[:, :60], x[:, 1:])
    model = sysid.dmdc(pair, u)

    def resid(a, b):
        return _fro(pair.x_prime - a @ pair.x - b @ u)

    best = resid(model.a, model.b)
    assert best > 1e-3
    for _ in range(200):
        scale = 10.0 ** rng.uniform(-6, -1)
        da = scale * rng.standard_normal(model.a.shape)
        db = scale * rng.standard_normal(model.b.shape)
        assert resid(model.a + da, model.b + db) >= best


def test_dmdc_deterministic(rng):
    _, _, s, u = linear_dataset(rng, 4, 3, 80)
    pair = build_snapshot_pair(s, 0, 70)
    m1 = sysid.dmdc(pair, u.values[:, :70])
    m2 = sysid.dmdc(pair, u.values[:, :70])
    assert m1.a.tobytes() == m2.a.tobytes() and m1.b.tobytes() == m2.b.tobytes()


# -- HDMDc ------------------------------------------------------------------

def test_hdmdc_h1_matches_dmdc(rng):
    _, _, s, u = linear_dataset(rng, 3, 2, 60)
    hm = sysid.hdmdc(s, u, 1, 50)
    dm = sysid.dmdc(build_snapshot_pair(s, 0, 50), u.values[:, :50])
    np.testing.assert_allclose(hm.a, dm.a, rtol=0, atol=1e-12)
    np.testing.assert_allclose(hm.b, dm.b, rtol=0, atol=1e-12)


def test_hdmdc_protocol_dimensions(rng):
    s = TimeSeries(rng.standard_normal((8, 420)))
    u = ControlSequence(rng.integers(0, 2, (8, 420)))
    model = sysid.hdmdc(s, u, 9, 400)
    assert model.a.shape == (72, 72)
    assert model.b.shape == (72, 72)
    assert model.training_columns == 392
    a_cur, b_cur = sysid.extract_current_block(model)
    assert a_cur.shape == (8, 72) and b_cur.shape == (8, 72)


def test_hdmdc_learns_the_shift_structure(rng):
    _, _, s, u = linear_dataset(rng, 2, 1, 200)
    model = sysid.hdmdc(s, u, 3, 150)
    hp = build_hankel_pair(s, u, 3, 150)
    # upper blocks reproduce the delay shift on the training data
    np.testing.assert_allclose((model.a @ hp.x_tilde + model.b @ hp.upsilon_tilde)[:4],
                               hp.x_tilde[2:], atol=1e-9)


def test_hdmdc_scalar_rollout_matches_truth():
    a, b, h = 0.8, 1.5, 3
    rng = np.random.default_rng(5)
    u = rng.integers(0, 2, (1, 400)).astype(float)
    x = simulate_linear(np.array([[a]]), np.array([[b]]), np.array([2.0]), u)
    s, cs = TimeSeries(x[:, :400]), ControlSequence(u)
    m = 150
    model = sysid.hdmdc(s, cs, h, m)
    res = predict.rollout(model, x[:, m - h + 1:m + 1], u[:, m - h + 1:m + 200], 200)
    assert np.max(np.abs(res.predicted - x[:, m + 1:m + 201])) <= 1e-6


def test_extract_current_block():
    a = np.arange(16.0).reshape(4, 4)
    b = np.arange(8.0).reshape(4, 2)
    model = sysid.LinearModel(a, b, 2, 2, 1, 4, 10)
    a_cur, b_cur = sysid.extract_current_block(model)
    np.testing.assert_array_equal(a_cur, a[2:])
    np.testing.assert_array_equal(b_cur, b[2:])

    flat = sysid.LinearModel(np.eye(2), np.ones((2, 1)), 1, 2, 1, 2, 5)
    a_cur, b_cur = sysid.extract_current_block(flat)
    np.testing.assert_array_equal(a_cur, flat.a)
    np.testing.assert_array_equal(b_cur, flat.b)


def test_linear_model_shape_validation():
    with pytest.raises(ShapeMismatchError):
        sysid.LinearModel(np.eye(3), np.ones((3, 1)), 2, 2, 1, 2, 5)

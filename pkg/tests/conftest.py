import numpy as np
import pytest

from queuedmd.snapshots import ControlSequence, TimeSeries


def random_stable_system(rng, n, q, radius=0.9):
    a = rng.standard_normal((n, n))
    a *= radius / max(np.abs(np.linalg.eigvals(a)).max(), 1e-12) * rng.uniform(0.5, 1.0)
    b = rng.standard_normal((n, q))
    return a, b


def simulate_linear(a, b, x0, u):
    """Plain forward recursion x[k+1] = a x[k] + b u[k]; returns n x (steps+1)."""
    steps = u.shape[1]
    x = np.empty((a.shape[0], steps + 1))
    x[:, 0] = x0
    for k in range(steps):
        x[:, k + 1] = a @ x[:, k] + b @ u[:, k]
    return x


def linear_dataset(rng, n, q, steps, radius=0.9):
    """Noiseless trajectory of a random stable system under random binary input."""
    a, b = random_stable_system(rng, n, q, radius)
    u = rng.integers(0, 2, size=(q, steps)).astype(float)
    x = simulate_linear(a, b, rng.standard_normal(n), u)
    # align lengths: state column k pairs with control column k
    return a, b, TimeSeries(x[:, :steps]), ControlSequence(u)


@pytest.fixture
def rng():
    return np.random.default_rng(20170217)


# -- acceptance reporting -----------------------------------------------------

ACCEPTANCE_RESULTS = {}


@pytest.fixture
def criterion(request):
    """Record one acceptance criterion; call with (name, passed, detail)."""

    def record(name, passed, detail=""):
        ACCEPTANCE_RESULTS[name] = (bool(passed), detail)
        return passed

    return record


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for name, (ok, detail) in ACCEPTANCE_RESULTS.items():
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  {name}  {detail}")

import numpy as np
import pytest
from hypothesis import strategies as st

from cfjs.core import PreferencePair

WORKED_A = (0.1, 0.2, 0.3, 0.4)
WORKED_B = (0.3, 0.2, 0.2, 0.3)
WORKED_MATRIX = np.array([
    [0.0, 0.0, 0.0, 0.1],
    [0.0, 0.0, 0.1, 0.1],
    [0.0, 0.2, 0.0, 0.1],
    [0.3, 0.0, 0.1, 0.0],
])


@pytest.fixture
def worked_pair():
    return PreferencePair(np.array(WORKED_A), np.array(WORKED_B))


@pytest.fixture
def worked_matrix():
    return WORKED_MATRIX.copy()


def prob_vectors(n_min=2, n_max=8, allow_zero=True):
    """Hypothesis strategy for probability vectors built from nonnegative weights."""
    lo = 0.0 if allow_zero else 1e-3

    def normalise(w):
        w = np.asarray(w, dtype=np.float64)
        return w / w.sum()

    return st.integers(n_min, n_max).flatmap(
        lambda n: st.lists(st.floats(lo, 1.0), min_size=n, max_size=n)
        .filter(lambda w: sum(w) > 1e-3)
        .map(normalise)
    )


def random_simplex(rng, n):
    e = rng.standard_exponential(n)
    return e / e.sum()


def shrink_below_one(a, b):
    """Mix ``(a, b)`` towards uniform just enough that every popularity is at most 1."""
    n = a.size
    s_max = np.max(a + b)
    if s_max <= 1.0:
        return PreferencePair(a, b)
    lam = (1.0 - 2.0 / n) / (s_max - 2.0 / n)
    u = np.full(n, 1.0 / n)
    return PreferencePair(lam * a + (1 - lam) * u, lam * b + (1 - lam) * u)


def random_pair_below_one(rng, n, symmetric=False):
    """Random pair with every popularity at most 1; many land on the boundary."""
    a = random_simplex(rng, n)
    b = a if symmetric else random_simplex(rng, n)
    return shrink_below_one(a, b)


# ------------------------------------------------------ acceptance reporting

_CRITERIA = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion")
    config.addinivalue_line("markers", "slow: runs for minutes")


def pytest_runtest_makereport(item, call):
    marker = item.get_closest_marker("criterion")
    if marker is None or call.when != "call":
        return
    number, title = marker.args
    _CRITERIA[number] = (title, call.excinfo is None)


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_CRITERIA):
        title, ok = _CRITERIA[number]
        terminalreporter.write_line(f"criterion {number:2d}: {'PASS' if ok else 'FAIL'}  {title}")

import time

import numpy as np
import pytest

from dyadic_cubes import from_points, validate_metric


def line_metric(n):
    idx = np.arange(n)
    return np.abs(np.subtract.outer(idx, idx)).astype(float)


def random_cloud(rng, n_lo=16, n_hi=200):
    """Uniform points in the unit square, deduplicated."""
    n = int(rng.integers(n_lo, n_hi + 1))
    pts = np.unique(rng.uniform(size=(n, 2)), axis=0)
    return from_points(pts)


def lattice_space(rng, n_lo=4, n_hi=24, side=7, metric="cityblock"):
    """Distinct integer lattice points under an integer-valued metric."""
    n = int(rng.integers(n_lo, n_hi + 1))
    cells = rng.choice(side * side, size=n, replace=False)
    pts = np.column_stack([cells // side, cells % side]).astype(float)
    return from_points(pts, metric=metric)


@pytest.fixture(scope="session")
def grid16():
    return validate_metric(line_metric(16))


@pytest.fixture(scope="session")
def E_left():
    return list(range(8))


@pytest.fixture(scope="session")
def E_even():
    return list(range(0, 16, 2))


# -- acceptance reporting ---------------------------------------------------

SUITE_BUDGET_S = 300
ACCEPTANCE_LINES = []


def pytest_sessionstart(session):
    session.config._dyadic_t0 = time.perf_counter()


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not ACCEPTANCE_LINES:
        return
    elapsed = time.perf_counter() - config._dyadic_t0
    terminalreporter.section("acceptance criteria")
    for line in ACCEPTANCE_LINES:
        terminalreporter.write_line(line)
    verdict = "PASS" if elapsed < SUITE_BUDGET_S else "FAIL"
    terminalreporter.write_line(
        f"{verdict} [7b] full test session took {elapsed:.1f}s (budget {SUITE_BUDGET_S}s)")


def pytest_sessionfinish(session, exitstatus):
    t0 = getattr(session.config, "_dyadic_t0", None)
    if ACCEPTANCE_LINES and t0 is not None and time.perf_counter() - t0 >= SUITE_BUDGET_S:
        session.exitstatus = 1

import numpy as np
import pytest

from hsball import PointSeq, SpaceParams


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


def seq_of(params, *pts):
    return PointSeq.from_points(params, [np.atleast_1d(np.asarray(p, dtype=complex)) for p in pts])


@pytest.fixture
def disc_s0():
    return SpaceParams(1, 0.0, 2.0)


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in RESULTS:
            terminalreporter.write_line(line)

import numpy as np
import pytest

from hcr.ingest import PairedSample, SampleMatrix


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def small_pair(rng):
    x = rng.standard_normal((60, 2))
    y = rng.standard_normal((60, 1))
    return PairedSample(SampleMatrix(x), SampleMatrix(y))


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if not RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(RESULTS):
        ok, name, detail = RESULTS[num]
        terminalreporter.write_line(f"[{'PASS' if ok else 'FAIL'}] {num}. {name}: {detail}")

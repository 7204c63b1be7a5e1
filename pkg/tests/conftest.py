import numpy as np
import pytest
from hypothesis import settings

settings.register_profile("default", max_examples=60, deadline=None)
settings.load_profile("default")


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


ACCEPTANCE_CRITERIA = 13
_acceptance_lines = {}


@pytest.fixture(scope="session")
def acceptance_report():
    """Record ``criterion n: PASS/FAIL`` for the terminal summary."""

    def report(n, ok, detail):
        _acceptance_lines[n] = f"criterion {n:2d}: {'PASS' if ok else 'FAIL'}  {detail}"
        return ok

    return report


def pytest_terminal_summary(terminalreporter):
    if not _acceptance_lines:
        return
    terminalreporter.section("acceptance criteria")
    for n in range(1, ACCEPTANCE_CRITERIA + 1):
        terminalreporter.write_line(
            _acceptance_lines.get(n, f"criterion {n:2d}: FAIL  (not reached)"))

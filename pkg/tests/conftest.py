import numpy as np
import pytest

from cvahedge.market import MertonParams
from cvahedge.pricing import EuropeanOption


@pytest.fixture
def call():
    return EuropeanOption("call", 95.0, 1.0)


@pytest.fixture
def put():
    return EuropeanOption("put", 95.0, 1.0)


@pytest.fixture
def merton_params():
    return MertonParams(r=0.1, sigma=0.2, mu_j=-0.125, sigma_j=0.1, xi=0.1)


def rel(a, b):
    return np.abs(np.asarray(a) - np.asarray(b)) / np.maximum(np.abs(b), 1e-300)


ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def report():
    """Record one PASS/FAIL line for the acceptance summary, then assert."""

    def _report(label: str, ok: bool, detail: str):
        line = f"{label}: {'PASS' if ok else 'FAIL'} | {detail}"
        ACCEPTANCE_LINES.append(line)
        print(line)
        assert ok, line

    return _report


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)

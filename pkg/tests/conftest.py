import warnings
from pathlib import Path

import pytest

from hyperabc.automata import hoa_import
from hyperabc.pipeline import bundled_path, bundled_problem
from hyperabc.sos import available_backends

DATA = Path(__file__).parent / "data"


def solver_available() -> bool:
    return bool(available_backends())


requires_solver = pytest.mark.skipif(not solver_available(), reason="no SDP solver backend installed")


def skip_without_solver():
    if not solver_available():
        warnings.warn("no SDP solver backend installed; synthesis checks skipped")
        pytest.skip("no SDP solver backend installed")


@pytest.fixture(scope="session")
def vehicle():
    return bundled_problem("vehicle_opacity")


@pytest.fixture(scope="session")
def room():
    return bundled_problem("room_robustness")


@pytest.fixture(scope="session")
def branching():
    return hoa_import(bundled_path("branching.hoa").read_text())


@pytest.fixture(scope="session")
def forked():
    return hoa_import(bundled_path("forked.hoa").read_text())


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)

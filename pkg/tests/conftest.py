import os
import sys
from pathlib import Path

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

sys.path.insert(0, str(Path(__file__).parent))

settings.register_profile("default", max_examples=60, deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.register_profile("thorough", max_examples=800, deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))

# filled by the acceptance tests, echoed after the run
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance")
        for line in sorted(ACCEPTANCE_LINES, key=lambda l: int(l.split()[1])):
            terminalreporter.write_line(line)


DATA = Path(__file__).resolve().parent.parent / "data"

FLEISS = np.array([[75, 1, 4], [5, 4, 1], [0, 0, 10]], dtype=float)
NELSON_PEPE = np.array([[80, 10], [10, 0]], dtype=float)
KRAMER_FEINSTEIN = np.array([[1, 2, 0, 0], [1, 5, 3, 1], [1, 4, 5, 2], [1, 1, 1, 2]], dtype=float)


@pytest.fixture
def fleiss():
    from deltaagree import ContingencyTable
    return ContingencyTable(FLEISS)


@pytest.fixture
def nelson_pepe():
    from deltaagree import ContingencyTable
    return ContingencyTable(NELSON_PEPE)


@pytest.fixture
def kramer():
    from deltaagree import ContingencyTable
    return ContingencyTable(KRAMER_FEINSTEIN)

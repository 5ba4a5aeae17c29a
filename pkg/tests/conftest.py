import warnings

import numpy as np
import pytest

from zitterlab.core import PhysicalParams
from zitterlab.spectral import TruncationWarning

ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def nonrel():
    return PhysicalParams.from_lambda_c(0.6)


@pytest.fixture
def rel():
    return PhysicalParams.from_lambda_c(5.4)


@pytest.fixture
def quiet():
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", TruncationWarning)
        yield


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)

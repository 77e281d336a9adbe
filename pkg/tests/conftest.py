import os
import sys
import warnings

import pytest

from crfintent.graph import UnusedProbabilityWarning

sys.path.insert(0, os.path.dirname(__file__))


@pytest.fixture(autouse=True)
def _quiet_unused_pairs():
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", UnusedProbabilityWarning)
        yield


def pytest_terminal_summary(terminalreporter):
    from acceptance_log import RESULTS

    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for number in sorted(RESULTS):
            terminalreporter.write_line(RESULTS[number])

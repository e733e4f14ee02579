import os
import sys

sys.path.insert(0, os.path.dirname(__file__))

import test_acceptance  # noqa: E402


def pytest_terminal_summary(terminalreporter):
    if test_acceptance.RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in test_acceptance.summary_lines():
            terminalreporter.write_line(line)

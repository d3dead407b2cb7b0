import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from helpers import words  # noqa: E402

from armtrace.relations import ModelChain  # noqa: E402


@pytest.fixture
def worked_chain():
    return ModelChain(words("a", "ab", "b"), words("a", "ab"), words("ab"))


def pytest_terminal_summary(terminalreporter):
    module = sys.modules.get("test_acceptance")
    lines = getattr(module, "RESULTS", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)

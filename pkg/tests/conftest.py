import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

FIXTURES = Path(__file__).parent / "fixtures"
EXAMPLE = FIXTURES / "example.qdf"


@pytest.fixture
def example_path() -> Path:
    return EXAMPLE


@pytest.fixture
def example_bytes() -> bytes:
    return EXAMPLE.read_bytes()


@pytest.fixture
def example_doc():
    from qdf import parse_file
    return parse_file(EXAMPLE).document


def pytest_terminal_summary(terminalreporter):
    module = sys.modules.get("test_acceptance")
    if module is None or not module.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for line in module.RESULTS.values():
        terminalreporter.write_line(line)

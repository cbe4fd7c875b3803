from __future__ import annotations

import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from corpus import FIB, LOOP, STREAM  # noqa: E402

from eqlog import parse_program  # noqa: E402


@pytest.fixture
def p_fib():
    return parse_program(FIB)


@pytest.fixture
def p_loop():
    return parse_program(LOOP)


@pytest.fixture
def p_stream():
    return parse_program(STREAM)


def pytest_terminal_summary(terminalreporter):
    module = sys.modules.get("test_acceptance")
    results = getattr(module, "RESULTS", None)
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(results):
        terminalreporter.write_line(results[n])

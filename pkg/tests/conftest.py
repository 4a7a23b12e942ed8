from __future__ import annotations

import pytest

# filled by test_acceptance.py: criterion number -> (passed, description)
ACCEPTANCE_RESULTS: dict[int, tuple[bool, str]] = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE_RESULTS):
        ok, desc = ACCEPTANCE_RESULTS[n]
        terminalreporter.write_line(f"[{'PASS' if ok else 'FAIL'}] {n:2d}. {desc}")


@pytest.fixture(scope="session")
def rng():
    import numpy as np

    return np.random.default_rng(20240611)

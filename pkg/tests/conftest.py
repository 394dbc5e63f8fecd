import warnings

import pytest

from fracdq.kernels import ConditioningWarning

_ACCEPTANCE = []


@pytest.fixture
def criterion():
    """Record one acceptance line ``(number, ok, detail)`` for the end-of-run summary."""

    def record(number: int, ok: bool, detail: str):
        _ACCEPTANCE.append((number, ok, detail))
        return ok

    return record


@pytest.fixture
def quiet():
    """Silence conditioning warnings for runs that opt out of the condition cap."""
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", ConditioningWarning)
        yield


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number, ok, detail in sorted(_ACCEPTANCE):
        terminalreporter.write_line(f"criterion {number:2d}: {'PASS' if ok else 'FAIL'}  {detail}")

import os

import pytest
from hypothesis import settings

settings.register_profile("default", deadline=None, max_examples=60)
settings.load_profile("default")


@pytest.fixture(autouse=True)
def _no_k_override(monkeypatch):
    # keep tests independent of the caller's environment
    monkeypatch.delenv("HSMRC_DEFAULT_K", raising=False)
    yield


def pytest_report_header(config):
    return f"HSMRC_DEFAULT_K in caller env: {os.environ.get('HSMRC_DEFAULT_K', '<unset>')}"


ACCEPTANCE_KEY = pytest.StashKey[list]()


@pytest.fixture
def acceptance_log(request):
    """Collects (criterion, passed, detail) lines; printed in the terminal summary."""
    return request.config.stash.setdefault(ACCEPTANCE_KEY, [])


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = config.stash.get(ACCEPTANCE_KEY, [])
    if not lines:
        return
    terminalreporter.section("acceptance criteria")
    for number, passed, detail in sorted(lines):
        terminalreporter.write_line(f"criterion {number}: {'PASS' if passed else 'FAIL'}  {detail}")

import numpy as np
import pytest

from rotkit.so3 import haar_random


@pytest.fixture(scope="session")
def haar10k():
    return haar_random(20240601, 10_000)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


# Acceptance reporting ---------------------------------------------------------

import time

SUITE_LIMIT_S = 300.0


def pytest_configure(config):
    config._acceptance_lines = []
    config._started = time.perf_counter()


@pytest.fixture
def acceptance(request):
    """Record one PASS/FAIL line for an acceptance criterion, then assert it."""
    lines = request.config._acceptance_lines

    def record(label, ok, detail):
        line = f"{'PASS' if ok else 'FAIL'}  {label}: {detail}"
        lines.append(line)
        print(line)
        assert ok, line
    return record


@pytest.hookimpl(tryfirst=True)
def pytest_sessionfinish(session, exitstatus):
    cfg = session.config
    if not cfg._acceptance_lines:
        return
    elapsed = time.perf_counter() - cfg._started
    ok = elapsed < SUITE_LIMIT_S
    cfg._acceptance_lines.append(
        f"{'PASS' if ok else 'FAIL'}  9b suite runtime: {elapsed:.1f} s for "
        f"{session.testscollected} tests (limit {SUITE_LIMIT_S:.0f} s)")
    if not ok:
        session.exitstatus = 1


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if config._acceptance_lines:
        terminalreporter.section("acceptance criteria")
        for line in config._acceptance_lines:
            terminalreporter.write_line(line)

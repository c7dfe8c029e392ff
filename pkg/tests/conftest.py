import os
import time
from functools import wraps

import pytest
from hypothesis import HealthCheck, settings

settings.register_profile("default", deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))

FIXTURES = os.path.join(os.path.dirname(__file__), "fixtures")

ACCEPTANCE = {}


def criterion(number, title, limit):
    """Record a pass/fail line (with wall time) for an acceptance criterion."""

    def deco(fn):
        @wraps(fn)
        def wrapper(*args, **kwargs):
            t0 = time.perf_counter()
            status = "FAIL"
            try:
                fn(*args, **kwargs)
                elapsed = time.perf_counter() - t0
                assert elapsed < limit, f"took {elapsed:.2f}s, limit {limit}s"
                status = "PASS"
            finally:
                ACCEPTANCE[number] = (title, status, time.perf_counter() - t0, limit)

        return wrapper

    return deco


@pytest.fixture
def fixture_path():
    return lambda name: os.path.join(FIXTURES, name)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE):
        title, status, elapsed, limit = ACCEPTANCE[k]
        terminalreporter.write_line(f"criterion {k:2d} {status}  {title}  ({elapsed:.2f}s, limit {limit}s)")

import time

import pytest

from gridlay.tech import load_tech_file

_SESSION_START = time.monotonic()
SUITE_BUDGET_S = 60.0


@pytest.fixture(scope="session")
def finfet():
    return load_tech_file("mock_finfet")


@pytest.fixture(scope="session")
def planar():
    return load_tech_file("mock_planar")


def pytest_sessionfinish(session, exitstatus):
    elapsed = time.monotonic() - _SESSION_START
    ok = elapsed < SUITE_BUDGET_S
    print(f"\nACCEPTANCE 7 (suite runtime {elapsed:.1f}s < {SUITE_BUDGET_S:.0f}s): "
          f"{'PASS' if ok else 'FAIL'}")
    if not ok and exitstatus == 0:
        session.exitstatus = 1

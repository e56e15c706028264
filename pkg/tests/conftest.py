import numpy as np
import pytest


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def dict_text():
    return (
        "# toy dictionary\n"
        "CAT K AE1 T\n"
        "SING S IH1 ENG\n"
        "DOG D AO1 G\n"
        "THE DH AH0\n"
        "THE(2) DH IY0\n"
    )


SUITE_RUNTIME_BOUND = 60.0
_start = {}


def pytest_sessionstart(session):
    import time
    _start["t"] = time.perf_counter()


def pytest_sessionfinish(session, exitstatus):
    import time
    elapsed = time.perf_counter() - _start["t"]
    session.config._suite_elapsed = elapsed
    if elapsed >= SUITE_RUNTIME_BOUND and exitstatus == 0:
        session.exitstatus = 1


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    elapsed = getattr(config, "_suite_elapsed", None)
    if elapsed is None:
        return
    ok = elapsed < SUITE_RUNTIME_BOUND
    terminalreporter.write_line(
        f"ACCEPTANCE 9 runtime {'PASS' if ok else 'FAIL'}: "
        f"suite ran in {elapsed:.1f} s (< {SUITE_RUNTIME_BOUND:.0f} s)"
    )

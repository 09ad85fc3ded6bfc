import numpy as np
import pytest
from hypothesis import HealthCheck, settings

settings.register_profile(
    "default",
    max_examples=40,
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("default")


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


_ACCEPTANCE = {}


def pytest_runtest_logreport(report):
    if "test_acceptance.py::test_criterion" in report.nodeid and report.when == "call":
        _ACCEPTANCE[report.nodeid] = report


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for nodeid in sorted(_ACCEPTANCE):
        rep = _ACCEPTANCE[nodeid]
        line = next((l for l in rep.capstdout.splitlines() if l.startswith("criterion")), nodeid)
        if rep.failed and not line.rstrip().endswith("FAIL"):
            line = f"{nodeid} FAIL"
        terminalreporter.write_line(line)

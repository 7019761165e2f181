import re

import pytest
from hypothesis import HealthCheck, settings

from seedmra import BoxMomentum, Gaussian, overlap_table, spectral_series

settings.register_profile("default", deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

# one line per acceptance criterion, taken from the real test outcome
ACCEPTANCE_LINES: dict = {}
_CRITERION = re.compile(r"test_acceptance\.py::test_criterion_(\d+[a-z]?)_")


def pytest_runtest_logreport(report):
    m = _CRITERION.search(report.nodeid)
    if m is None or report.when == "teardown" or (report.when == "setup" and report.passed):
        return
    key = m.group(1).lstrip("0")
    detail = dict(report.user_properties).get("detail", "")
    status = "PASS" if report.passed else "FAIL"
    ACCEPTANCE_LINES[key] = f"criterion {key:>3}: {status}  {detail}".rstrip()


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE_LINES, key=lambda k: (int(re.match(r"\d+", k).group()), k)):
        terminalreporter.write_line(ACCEPTANCE_LINES[key])


@pytest.fixture(scope="session")
def gaussian():
    return Gaussian()


@pytest.fixture(scope="session")
def gaussian_table(gaussian):
    return overlap_table(gaussian, 8)


@pytest.fixture(scope="session")
def gaussian_series(gaussian_table):
    return spectral_series(gaussian_table)


@pytest.fixture(scope="session")
def box3_table():
    return overlap_table(BoxMomentum(3), 4)


@pytest.fixture(scope="session")
def catalog_results():
    """All nine worked examples, run once per session."""
    from seedmra.catalog import run_example

    return {n: run_example(n) for n in range(1, 10)}

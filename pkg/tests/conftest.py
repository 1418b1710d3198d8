import numpy as np
import pytest

from cobsi.survey import SurveyGeometry


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


def small_geometry(m=16, n=5, k=6, dt=0.004, dg=10.0, ds=30.0):
    return SurveyGeometry.regular_time(
        dt, m, (np.arange(n) - (n - 1) / 2) * dg, np.arange(k) * ds
    )


@pytest.fixture
def geometry():
    return small_geometry()


def pytest_terminal_summary(terminalreporter):
    import sys

    mod = sys.modules.get("test_acceptance")
    results = getattr(mod, "RESULTS", None)
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(results):
        ok, detail = results[n]
        terminalreporter.write_line(f"criterion {n}: {'PASS' if ok else 'FAIL'}  {detail}")

import os

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from nlfem.kernel import make_kernel_family
from nlfem.mesh import generate_unit_square_mesh

# numba-compiled paths make the first example slow; deadlines would only flake
settings.register_profile("default", deadline=None, max_examples=40,
                          suppress_health_check=[HealthCheck.too_slow])
settings.register_profile("ci", deadline=None, max_examples=200,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))


@pytest.fixture(scope="session")
def mesh4():
    return generate_unit_square_mesh(4)


@pytest.fixture(scope="session")
def mesh8():
    return generate_unit_square_mesh(8)


@pytest.fixture(scope="session")
def const_kernel():
    return lambda delta: make_kernel_family((1.0,), delta)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


# --------------------------------------------------------------------------
# acceptance report: one PASS/FAIL line per criterion, repeated at the end of
# the run so it is visible even with captured output

_REPORT_KEY = pytest.StashKey[list]()


@pytest.fixture
def report(request):
    lines = request.config.stash.setdefault(_REPORT_KEY, [])

    def emit(number: int, passed: bool, detail: str) -> bool:
        line = f"{'PASS' if passed else 'FAIL'} criterion {number}: {detail}"
        print(line)
        lines.append(line)
        return passed

    return emit


def pytest_terminal_summary(terminalreporter, config):
    lines = config.stash.get(_REPORT_KEY, [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines, key=lambda s: int(s.split()[2].rstrip(":"))):
            terminalreporter.write_line(line)

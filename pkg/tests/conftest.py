import pytest
from hypothesis import settings

from magflow.field import ConformalMetric, MagneticField
from magflow.hyp import HalfPlanePoint
from magflow.surface import Bump, InvariantOneForm, InvariantScalar, default_group

settings.register_profile("magflow", deadline=None, max_examples=40, derandomize=True)
settings.load_profile("magflow")


@pytest.fixture(scope="session")
def group():
    return default_group()


@pytest.fixture(scope="session")
def u_bump(group):
    return InvariantScalar(group, 0.0, [Bump(group.base_point, 0.2, 1.0)])


@pytest.fixture(scope="session")
def off_bump(group):
    return InvariantScalar(group, 0.1, [Bump(HalfPlanePoint(0.3, 1.2), 0.15, 0.7)])


@pytest.fixture(scope="session")
def beta_bump(group):
    return InvariantOneForm(group, [Bump(HalfPlanePoint(0.2, 1.1), 0.3, 0.8)])


@pytest.fixture(scope="session")
def flat():
    return ConformalMetric()


@pytest.fixture(scope="session")
def bumped(u_bump):
    return ConformalMetric(u_bump)


@pytest.fixture(scope="session")
def unit_field():
    return MagneticField(1.0)


def pytest_terminal_summary(terminalreporter):
    from test_acceptance import RESULTS

    if not RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(RESULTS):
        terminalreporter.write_line(RESULTS[key].line())

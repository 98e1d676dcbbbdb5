import numpy as np
import pytest

from nct.core import AlgebraElement, ThetaMatrix

# criterion number -> (title, passed, detail); filled by test_acceptance
ACCEPTANCE = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(ACCEPTANCE):
        title, passed, detail = ACCEPTANCE[num]
        terminalreporter.write_line(f"[{'PASS' if passed else 'FAIL'}] {num:2d}. {title}: {detail}")


@pytest.fixture(params=["zero", "golden"])
def theta(request):
    return ThetaMatrix.preset(request.param, 2)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def generators(theta):
    return [AlgebraElement.generator(theta, j) for j in range(1, theta.d + 1)]


def standard_element(theta):
    U1, U2 = generators(theta)[:2]
    return U1 + U1.H + U2 + U2.H

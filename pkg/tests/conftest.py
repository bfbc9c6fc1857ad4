import numpy as np
import pytest

from dualmpc.belief import prior_from_bias
from dualmpc.mpc import MpcConfig
from dualmpc.plant import double_integrator

REF_BIAS_A = [[0.5, 0.5], [0.0, 0.25]]
REF_BIAS_B = [[0.1], [0.25]]
REF_X0 = (0.4, 0.1)


@pytest.fixture
def plant():
    return double_integrator(0.1, 5e-4)


@pytest.fixture
def prior(plant):
    return prior_from_bias(plant, REF_BIAS_A, REF_BIAS_B, 1.0)


def reference_cfg(**kw):
    base = dict(N=3, Q=np.diag([10.0, 1.0]), R=np.eye(1), P=np.diag([10.0, 1.0]),
                u_min=[-10.0], u_max=[10.0], alpha=1.0, epsilon=0.05, sigma_w2=5e-4)
    base.update(kw)
    return MpcConfig(**base)


@pytest.fixture
def cfg():
    return reference_cfg()


_ACCEPTANCE = []


def record_acceptance(criterion, passed, detail):
    _ACCEPTANCE.append((criterion, passed, detail))


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for criterion, passed, detail in sorted(_ACCEPTANCE, key=lambda r: r[0]):
        terminalreporter.write_line(
            f"criterion {criterion:>2}: {'PASS' if passed else 'FAIL'}  {detail}")

import functools

import pytest

from ringtc import ModelParams, simulate

ACCEPTANCE_LINES: list[str] = []


@functools.lru_cache(maxsize=None)
def _ref_traj(Omega_over_TC, epsilon, T_TR=20, per_TR=200):
    p = ModelParams.reference(Omega_over_TC, epsilon)
    return simulate(p, T_TR * p.T_R, p.T_R / per_TR)


@pytest.fixture(scope="session")
def ref_traj():
    """Cached trajectories at the default ring parameters.

    ``ref_traj(Omega/Omega_TC, epsilon, T/T_R=20, samples per T_R=200)``
    """
    return _ref_traj


@pytest.fixture
def record_criterion():
    def record(label: str, passed: bool, detail: str):
        ACCEPTANCE_LINES.append(f"[{'PASS' if passed else 'FAIL'}] {label}: {detail}")
        return passed

    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)

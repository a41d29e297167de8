import pytest

from secuav import (SolverOptions, minimize_latency, reference_scenario, solve_cr,
                    solve_p1, solve_p1_binary)

from helpers import single_user_scenario

REF_SLOTS = 55


@pytest.fixture(scope="session")
def ref():
    return reference_scenario()


@pytest.fixture(scope="session")
def single_user():
    return single_user_scenario()


@pytest.fixture(scope="session")
def ref_run_default(ref):
    """One penalty run at the default weight, no escalation."""
    opts = SolverOptions()
    return solve_p1(ref, REF_SLOTS, opts)


@pytest.fixture(scope="session")
def ref_pen(ref):
    """Escalating penalty run; the schedule it returns is essentially binary."""
    opts = SolverOptions()
    return solve_p1_binary(ref, REF_SLOTS, opts)


@pytest.fixture(scope="session")
def ref_cr(ref):
    opts = SolverOptions()
    return solve_cr(ref, REF_SLOTS, opts)


@pytest.fixture(scope="session")
def ref_latency(ref):
    return minimize_latency(ref, SolverOptions())

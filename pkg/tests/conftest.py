import pytest

from iongate import make_params
from iongate.reproduce import build_baseline


@pytest.fixture(scope="session")
def params():
    return make_params()


@pytest.fixture(scope="session")
def baseline(params):
    """The optimised 120-ion, 10 um chain with both mode sets."""
    return build_baseline(params)


@pytest.fixture(scope="session")
def optimum(baseline):
    from iongate.reproduce import optimum_gate
    return optimum_gate(baseline)


ACCEPTANCE_LINES = []


@pytest.fixture
def report():
    """Record one acceptance line; the terminal summary prints them all."""

    def record(name, ok, detail):
        line = f"{'PASS' if ok else 'FAIL'}  {name}: {detail}"
        ACCEPTANCE_LINES.append(line)
        print(line)
        return ok

    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)

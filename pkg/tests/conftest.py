import pytest

from openstirap import PulseConfig, Sequence


@pytest.fixture
def ci10():
    return PulseConfig(alpha_t=10.0, delta_t=1.0, sequence=Sequence.COUNTERINTUITIVE)


@pytest.fixture
def int10():
    return PulseConfig(alpha_t=10.0, delta_t=1.0, sequence=Sequence.INTUITIVE)


ACCEPTANCE_LINES = []


@pytest.fixture
def acceptance():
    """Record one PASS/FAIL line per acceptance criterion."""

    def record(number, ok, detail):
        line = f"criterion {number}: {'PASS' if ok else 'FAIL'} | {detail}"
        ACCEPTANCE_LINES.append(line)
        print(line)
        return ok

    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)

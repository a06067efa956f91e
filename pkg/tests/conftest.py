import numpy as np
import pytest

from qwsnm.imageio import load_bundled


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


@pytest.fixture(scope="session")
def astronaut():
    return load_bundled("astronaut64")


ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def acceptance_report():
    """Record one verdict line per acceptance criterion."""

    def report(number, title, ok, detail=""):
        verdict = ok if isinstance(ok, str) else ("PASS" if ok else "FAIL")
        line = f"criterion {number} [{verdict}] {title}: {detail}"
        ACCEPTANCE_LINES.append(line)
        print(line)

    return report


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1])):
            terminalreporter.write_line(line)

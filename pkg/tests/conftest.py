from pathlib import Path

import pytest

from thetafix import finite_space, make_b_action, ThetaMetricSpace, IntervalDomain

CONFIGS = Path(__file__).resolve().parent.parent / "configs"

# acceptance criterion id -> (passed, detail); filled by test_acceptance.py
CRITERIA: dict[str, tuple[bool, str]] = {}


def pytest_terminal_summary(terminalreporter):
    if not CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for cid in sorted(CRITERIA, key=lambda c: int(c.split()[0])):
        ok, detail = CRITERIA[cid]
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  criterion {cid}: {detail}")


@pytest.fixture
def unit_interval():
    return ThetaMetricSpace(IntervalDomain(0.0, 1.0), make_b_action("product-sum"))


@pytest.fixture
def triangle():
    return finite_space("abc", {("a", "b"): 5, ("b", "c"): 12, ("a", "c"): 13}, make_b_action("euclid"))

"""Shared fixtures: small exact spaces reused across the test modules."""

from fractions import Fraction

import pytest
from hypothesis import HealthCheck, settings

from sepdet import FiniteMetricSpace, Point

settings.register_profile(
    "suite",
    max_examples=40,
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("suite")


def coord_space(pairs) -> FiniteMetricSpace:
    """Exact 1-D euclidean space from (id, rational coordinate) pairs."""
    return FiniteMetricSpace.from_coords(
        [Point(id=pid, coords=(Fraction(c),)) for pid, c in pairs])


# one line per acceptance criterion, echoed after the test summary
criterion_lines: list = []


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if criterion_lines:
        terminalreporter.section("acceptance criteria")
        for line in criterion_lines:
            terminalreporter.line(line)


@pytest.fixture
def line3() -> FiniteMetricSpace:
    # the three-point line {0, 1, 3}
    return coord_space([("p0", 0), ("p1", 1), ("p2", 3)])


@pytest.fixture
def grid5() -> FiniteMetricSpace:
    # symmetric grid {-2, -1, 0, 1, 2}
    return coord_space([(f"g{k}", k - 2) for k in range(5)])

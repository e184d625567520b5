import numpy as np
import pytest

ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


def random_points(rng, count=100):
    """(g, J, B, phi) samples away from B = 2g."""
    pts = []
    while len(pts) < count:
        g = rng.uniform(0.5, 2.0)
        J = rng.uniform(0.1, 1.0)
        B = rng.uniform(0.1, 4.0)
        if abs(B - 2 * g) < 1e-3:
            continue
        pts.append((g, J, B, rng.uniform(0, 2 * np.pi)))
    return pts


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)

import functools

import pytest
from hypothesis import HealthCheck, settings

from fraclab import assemble_galerkin, build_graded_grid, default_grading

settings.register_profile("repo", deadline=None, max_examples=40,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("repo")


@functools.lru_cache(maxsize=None)
def operator(s: float, N: int, q: float | None = None, R: float = 1.0):
    """Assembled operators shared across tests (assembly dominates runtime)."""
    grid = build_graded_grid(R, N, default_grading(s) if q is None else q)
    return assemble_galerkin(grid, s)


@pytest.fixture
def small_operator():
    return operator(0.5, 128)


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda t: t[0]):
            terminalreporter.write_line(line[1])

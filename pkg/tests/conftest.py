"""Shared fixtures and independent oracles for the test suite."""

from __future__ import annotations

import math

import numpy as np
import pytest

from msetdim import Graph, RandomGraphSpec, generate_gnp, is_connected


def floyd_warshall(g: Graph) -> np.ndarray:
    """Independent all-pairs oracle (cubic; for n <= 64)."""
    n = g.n
    inf = math.inf
    dist = np.full((n, n), inf)
    np.fill_diagonal(dist, 0.0)
    for u, v in g.edges():
        dist[u, v] = dist[v, u] = 1.0
    for k in range(n):
        dist = np.minimum(dist, dist[:, k : k + 1] + dist[k : k + 1, :])
    return dist


def random_graph(rng: np.random.Generator, n_min: int = 2, n_max: int = 10) -> Graph:
    n = int(rng.integers(n_min, n_max + 1))
    p = float(rng.uniform(0.15, 0.9))
    seed = int(rng.integers(0, 2**31))
    return generate_gnp(RandomGraphSpec(n=n, p=p, seed=seed))


def random_connected_graph(
    rng: np.random.Generator, n_min: int = 2, n_max: int = 10
) -> Graph:
    while True:
        g = random_graph(rng, n_min, n_max)
        if is_connected(g):
            return g


def random_member_set(rng: np.random.Generator, g: Graph) -> list[int]:
    size = int(rng.integers(1, g.n + 1))
    return sorted(int(v) for v in rng.choice(g.n, size=size, replace=False))


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20240817)


# Acceptance criterion outcomes, flushed after the run so the one-line
# verdicts stay visible even though pytest captures test stdout.
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)

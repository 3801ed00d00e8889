import numpy as np
import pytest

from macap import Mac

# column order (a1b1, a1b2, a2b1, a2b2) -> tensor [z][b1][b2]
NF1 = [[[1.0, 0.5], [0.5, 0.5]], [[0.0, 0.5], [0.5, 0.5]]]
NF2 = [[[1.0, 0.5], [0.5, 0.0]], [[0.0, 0.5], [0.5, 1.0]]]

ACCEPTANCE_LINES: list = []


@pytest.fixture
def nf1():
    return Mac(NF1)


@pytest.fixture
def nf2():
    return Mac(NF2)


def random_mac(rng, d1, d2, dout, sparsity=0.0):
    t = rng.random((dout, d1, d2)) ** 3
    if sparsity:
        t[rng.random(t.shape) < sparsity] = 0
        t[0][t.sum(axis=0) == 0] = 1
    return Mac(t / t.sum(axis=0))


def simplex_grid_array(d, n):
    """All points of {k/n : sum k = n} in R^d as an array (oracle helper)."""
    if d == 1:
        return np.array([[1.0]])
    if d == 2:
        i = np.arange(n + 1)
        return np.stack([i, n - i], axis=1) / n
    if d == 3:
        i, j = np.meshgrid(np.arange(n + 1), np.arange(n + 1), indexing="ij")
        m = i + j <= n
        i, j = i[m], j[m]
        return np.stack([i, j, n - i - j], axis=1) / n
    if d == 4:
        i, j, k = np.meshgrid(*[np.arange(n + 1)] * 3, indexing="ij")
        m = i + j + k <= n
        i, j, k = i[m], j[m], k[m]
        return np.stack([i, j, k, n - i - j - k], axis=1) / n
    raise ValueError(d)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)

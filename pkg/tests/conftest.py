import math

import numpy as np
import pytest


def brute_entropy(probs):
    """Entropy in bits by a plain loop; kept apart from the package code."""
    return max(0.0, -sum(p * math.log2(p) for p in np.ravel(probs) if p > 0))


def brute_mi(pxy):
    pxy = np.asarray(pxy, dtype=float)
    px = pxy.sum(axis=1)
    py = pxy.sum(axis=0)
    total = 0.0
    for a in range(pxy.shape[0]):
        for b in range(pxy.shape[1]):
            if pxy[a, b] > 0:
                total += pxy[a, b] * math.log2(pxy[a, b] / (px[a] * py[b]))
    return total


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)

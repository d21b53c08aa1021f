"""Worked instances and seeded random instance families."""

from __future__ import annotations

import numpy as np

from .dist import JointDistribution, validate_joint
from .separation import Separation, make_separation

# Ten light symbols and two heavy ones.  The light masses must be 0.005 for
# the pmf to sum to one; with them the revealed entropy of the best split is
# 0.4025 bits.
EXAMPLE2_P_X = np.array([0.005] * 10 + [0.475] * 2)


def example1_joint(n: int) -> JointDistribution:
    """Y uniform on ``{0,1}^n`` and X the number of ones in Y.

    X stands for the empirical mean ``i / n``; the label is the count ``i``.
    """
    if n < 1:
        raise ValueError("n must be at least 1")
    ys = np.arange(2 ** n)
    ones = np.array([bin(int(y)).count("1") for y in ys])
    pmf = np.zeros((n + 1, 2 ** n))
    pmf[ones, ys] = 2.0 ** -n
    y_labels = [format(int(y), f"0{n}b") for y in ys]
    return validate_joint(pmf, range(n + 1), y_labels)


def example2_joint() -> JointDistribution:
    """Twelve X symbols, each followed by a fair coin Y."""
    return validate_joint(np.outer(EXAMPLE2_P_X, [0.5, 0.5]), range(1, 13), (0, 1))


def _dirichlet(rng: np.random.Generator, k: int, sparsity: float = 0.0) -> np.ndarray:
    p = rng.dirichlet(np.ones(k))
    if sparsity and k > 1:
        drop = rng.random(k) < sparsity
        if drop.all():
            drop[rng.integers(k)] = False
        p[drop] = 0.0
        p /= p.sum()
    return p


def random_joint(rng: np.random.Generator, max_x: int = 4, max_y: int = 6,
                 sparsity: float = 0.25) -> JointDistribution:
    """Random joint with ``1 <= |X| <= max_x``, ``1 <= |Y| <= max_y`` and some zeros."""
    nx = int(rng.integers(1, max_x + 1))
    ny = int(rng.integers(1, max_y + 1))
    p_x = _dirichlet(rng, nx)
    rows = np.array([_dirichlet(rng, ny, sparsity) for _ in range(nx)])
    return validate_joint(p_x[:, None] * rows)


def random_x_of_y(rng: np.random.Generator, max_x: int = 4, max_y: int = 6) -> JointDistribution:
    """Random joint in which X is a deterministic function of Y, all masses positive."""
    nx = int(rng.integers(1, max_x + 1))
    ny = int(rng.integers(nx, max(nx, max_y) + 1))
    f = np.concatenate([np.arange(nx), rng.integers(0, nx, ny - nx)])
    rng.shuffle(f)
    p_y = _dirichlet(rng, ny)
    pmf = np.zeros((nx, ny))
    pmf[f, np.arange(ny)] = p_y
    return validate_joint(pmf)


SPLIT_SIZES = (4, 6, 8, 9)


def random_split_instance(rng: np.random.Generator, max_y: int = 4,
                          sizes=SPLIT_SIZES) -> JointDistribution:
    """Random joint whose X alphabet admits a separation grid."""
    nx = int(rng.choice(sizes))
    ny = int(rng.integers(2, max_y + 1))
    p_x = _dirichlet(rng, nx)
    rows = np.array([_dirichlet(rng, ny, 0.2) for _ in range(nx)])
    return validate_joint(p_x[:, None] * rows)


def random_functional_instance(rng: np.random.Generator, max_x1: int = 4, max_x2: int = 3,
                               max_y: int = 4) -> tuple[JointDistribution, Separation]:
    """Joint over a grid X = (X1, X2) with X2 = f(X1), plus that grid.

    X symbols are the grid cells in row-major order; only the cells
    ``(x1, f(x1))`` carry mass.
    """
    r = int(rng.integers(2, max_x1 + 1))
    c = int(rng.integers(2, max_x2 + 1))
    ny = int(rng.integers(2, max_y + 1))
    f = rng.integers(0, c, r)
    p_x1 = _dirichlet(rng, r)
    pmf = np.zeros((r * c, ny))
    for i in range(r):
        pmf[i * c + f[i]] = p_x1[i] * _dirichlet(rng, ny, 0.2)
    labels = [(i, k) for i in range(r) for k in range(c)]
    j = validate_joint(pmf, labels, range(ny))
    sep = make_separation(j.p_x, [[i * c + k for k in range(c)] for i in range(r)])
    return j, sep


def random_four_way(rng: np.random.Generator, shape=(2, 2, 2, 2)) -> np.ndarray:
    return rng.dirichlet(np.ones(int(np.prod(shape)))).reshape(shape)

"""Viewing X as a pair (X1, X2) laid out on a grid, and searching such views.

A :class:`Separation` assigns every X symbol to a cell of an ``r x c`` grid;
the row index is X1 and the column index is X2.  When ``|X|`` is prime the
grid has ``|X| + 1`` cells and the extra cell (the last one) carries no mass.

The search only needs the row (or column) sums, so it enumerates partitions
of the probability multiset into equal-size groups instead of bijections.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .coding import fixed_width
from .dist import JointDistribution, _hashable, Pmf, entropy_of, make_pmf, validate_joint
from .errors import BadSeparation, BudgetExceeded, DomainError, EmptyFeasibleSet

PAD = None
EXHAUSTIVE_MAX_SYMBOLS = 14
FEAS_TOL = 1e-9


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    return all(n % k for k in range(2, math.isqrt(n) + 1))


def grid_size(n: int) -> int:
    return n + 1 if is_prime(n) else n


def enumerate_shapes(n: int) -> list[tuple[int, int]]:
    """Factor pairs ``(a, b)`` with ``1 < a <= b`` and ``a * b`` equal to the grid size."""
    if n < 2:
        return []
    m = grid_size(n)
    return [(a, m // a) for a in range(2, math.isqrt(m) + 1) if m % a == 0]


@dataclass(frozen=True, eq=False)
class Separation:
    shape: tuple[int, int]
    rows: tuple[tuple, ...]
    p_x: np.ndarray

    @property
    def n_x1(self) -> int:
        return self.shape[0]

    @property
    def n_x2(self) -> int:
        return self.shape[1]

    @property
    def grid(self) -> np.ndarray:
        """``grid[x1, x2] = P(X1=x1, X2=x2)``."""
        g = np.zeros(self.shape)
        for i, row in enumerate(self.rows):
            for k, x in enumerate(row):
                if x is not PAD:
                    g[i, k] = self.p_x[x]
        return g

    @property
    def row_marginal(self) -> Pmf:
        return make_pmf(self.grid.sum(axis=1))

    @property
    def col_marginal(self) -> Pmf:
        return make_pmf(self.grid.sum(axis=0))

    @property
    def h_x1(self) -> float:
        return entropy_of(self.grid.sum(axis=1))

    @property
    def h_x2(self) -> float:
        return entropy_of(self.grid.sum(axis=0))

    def objective(self, side: str = "S1") -> float:
        """``H(X1) + ceil(log2|X2|)`` for S1, ``H(X2) + ceil(log2|X1|)`` for S2."""
        if side == "S1":
            return self.h_x1 + fixed_width(self.n_x2)
        if side == "S2":
            return self.h_x2 + fixed_width(self.n_x1)
        raise DomainError(f"unknown side {side!r}")

    def revealed_entropy(self, side: str = "S1") -> float:
        return self.h_x1 if side == "S1" else self.h_x2

    def key_size(self, side: str = "S1") -> int:
        return self.n_x2 if side == "S1" else self.n_x1

    def cell_of(self) -> dict:
        """Map from X index to its ``(x1, x2)`` cell."""
        return {x: (i, k) for i, row in enumerate(self.rows)
                for k, x in enumerate(row) if x is not PAD}

    def x2_is_function_of_x1(self) -> bool:
        return bool(np.all((self.grid > 0).sum(axis=1) <= 1))

    def to_dict(self, x_labels=None) -> dict:
        def name(x):
            if x is PAD:
                return None
            return _json_label(x_labels[x]) if x_labels is not None else x
        return {"shape": list(self.shape), "rows": [[name(x) for x in row] for row in self.rows]}


def _json_label(v):
    return [_json_label(t) for t in v] if isinstance(v, tuple) else v


def make_separation(p_x: Pmf | np.ndarray, rows) -> Separation:
    """Validate a grid assignment of X symbols (``None`` marks the pad cell)."""
    probs = p_x.probs if isinstance(p_x, Pmf) else np.asarray(p_x, dtype=float)
    n = probs.size
    rows = tuple(tuple(PAD if x is PAD else int(x) for x in row) for row in rows)
    r = len(rows)
    if r == 0 or len({len(row) for row in rows}) != 1:
        raise BadSeparation("rows must be non-empty and of equal length")
    c = len(rows[0])
    if r < 2 or c < 2:
        raise BadSeparation(f"both factors need more than one symbol, got shape ({r}, {c})")
    cells = [x for row in rows for x in row]
    symbols = [x for x in cells if x is not PAD]
    pads = len(cells) - len(symbols)
    if sorted(symbols) != list(range(n)):
        raise BadSeparation("assignment must use every X symbol exactly once")
    if r * c == n:
        if pads:
            raise BadSeparation("pad cell only allowed when |X| is prime")
    elif r * c == n + 1 and is_prime(n):
        if pads != 1:
            raise BadSeparation("a prime alphabet needs exactly one pad cell")
    else:
        raise BadSeparation(f"shape ({r}, {c}) does not fit |X| = {n}")
    return Separation((r, c), rows, probs.copy())


def separation_from_dict(obj: dict, j: JointDistribution) -> Separation:
    index = {lbl: i for i, lbl in enumerate(j.x_labels)}
    try:
        rows = [[PAD if v is None else index[_hashable(v)] for v in row]
                for row in obj["rows"]]
    except (KeyError, TypeError) as exc:
        raise BadSeparation(f"unknown X symbol in separation: {exc}") from exc
    sep = make_separation(j.p_x, rows)
    if "shape" in obj and tuple(obj["shape"]) != sep.shape:
        raise BadSeparation(f"declared shape {obj['shape']} != rows shape {sep.shape}")
    return sep


def lift_separation(j: JointDistribution, sep: Separation) -> JointDistribution:
    """Joint of ((X1, X2), Y): rows in row-major grid order, pad row all zero."""
    if sep.p_x.size != j.nx or not np.allclose(sep.p_x, j.p_x, atol=0, rtol=0):
        raise BadSeparation("separation was built for a different X marginal")
    r, c = sep.shape
    pmf = np.zeros((r * c, j.ny))
    labels = []
    for i, row in enumerate(sep.rows):
        for k, x in enumerate(row):
            labels.append((i, k))
            if x is not PAD:
                pmf[i * c + k] = j.pmf[x]
    return validate_joint(pmf, labels, j.y_labels)


def collapse_to_x1(j: JointDistribution, sep: Separation) -> JointDistribution:
    """Joint of (X1, Y), summing each grid row."""
    pmf = np.zeros((sep.n_x1, j.ny))
    for i, row in enumerate(sep.rows):
        for x in row:
            if x is not PAD:
                pmf[i] += j.pmf[x]
    return validate_joint(pmf, range(sep.n_x1), j.y_labels)


def functional_separation(p_x: Pmf | np.ndarray) -> Separation:
    """A grid on which X2 is a function of X1: one positive-mass cell per row.

    Positive-mass symbols go to column 0 of consecutive rows; zero-mass
    symbols fill the remaining cells.
    """
    probs = p_x.probs if isinstance(p_x, Pmf) else np.asarray(p_x, dtype=float)
    n = probs.size
    live = [x for x in range(n) if probs[x] > 0]
    dead = [x for x in range(n) if probs[x] <= 0]
    m = grid_size(n)
    r = len(live)
    if r < 2 or m % r or m // r < 2:
        raise BadSeparation(
            f"{r} positive-mass symbols cannot fill the rows of a grid of {m} cells")
    c = m // r
    filler = iter(dead + [PAD] * (m - n))
    rows = [[x] + [next(filler) for _ in range(c - 1)] for x in live]
    if PAD in rows[-1]:
        rows[-1] = [v for v in rows[-1] if v is not PAD] + [PAD]
    return make_separation(probs, rows)


# -- search -----------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class SearchResult:
    separation: Separation
    side: str
    objective: float
    revealed_entropy: float
    key_size: int
    feasible_count: int
    explored: int
    optimal: bool

    @property
    def shape(self) -> tuple[int, int]:
        return self.separation.shape


def _group_partitions(masses: list[float], size: int):
    """Partitions of indices into groups of ``size``, skipping equal-mass repeats."""
    def rec(remaining):
        if not remaining:
            yield []
            return
        first, rest = remaining[0], remaining[1:]
        seen = set()
        for combo in itertools.combinations(range(len(rest)), size - 1):
            key = tuple(sorted(masses[rest[k]] for k in combo))
            if key in seen:
                continue
            seen.add(key)
            chosen = set(combo)
            group = [first] + [rest[k] for k in combo]
            left = [rest[k] for k in range(len(rest)) if k not in chosen]
            for tail in rec(left):
                yield [group] + tail
    yield from rec(list(range(len(masses))))


def _layout(groups: list[list[int]], side: str, n: int) -> list[list]:
    pad = n  # index of the pad element when present
    groups = [sorted(g, key=lambda x: (x == pad, x)) for g in groups]
    groups.sort(key=lambda g: pad in g)
    cells = [[PAD if x == pad else x for x in g] for g in groups]
    if side == "S1":
        return cells
    return [list(col) for col in zip(*cells)]


def _shapes_both_ways(n: int):
    for a, b in enumerate_shapes(n):
        yield (a, b)
        if a != b:
            yield (b, a)


def search_separations(p_x: Pmf | np.ndarray, eps: float, which: str = "S1",
                       mode: str = "exhaustive", budget: int = 10**6) -> SearchResult:
    """Minimize ``H(revealed factor) + ceil(log2 |key factor|)`` over separations.

    ``which="S1"`` requires ``H(X1) <= eps`` (X2 is keyed); ``"S2"`` requires
    ``H(X2) <= eps`` (X1 is keyed).  Both grid orientations of every factor
    pair are considered.  ``mode="greedy"`` packs the largest masses together
    and improves by pairwise swaps; its result is flagged ``optimal=False``.
    """
    if which not in ("S1", "S2"):
        raise DomainError(f"unknown separation set {which!r}")
    if eps < 0:
        raise DomainError("eps must be non-negative")
    probs = p_x.probs if isinstance(p_x, Pmf) else np.asarray(p_x, dtype=float)
    n = probs.size
    masses = probs.tolist() + ([0.0] if grid_size(n) > n else [])
    if mode == "exhaustive" and n > EXHAUSTIVE_MAX_SYMBOLS:
        raise BudgetExceeded(
            f"exhaustive search is limited to |X| <= {EXHAUSTIVE_MAX_SYMBOLS}; use greedy")
    if mode not in ("exhaustive", "greedy"):
        raise DomainError(f"unknown search mode {mode!r}")

    best = None
    feasible = 0
    explored = 0
    for r, c in _shapes_both_ways(n):
        n_groups, size = (r, c) if which == "S1" else (c, r)
        key_bits = fixed_width(size)
        candidates = (_group_partitions(masses, size) if mode == "exhaustive"
                      else [_greedy_groups(masses, n_groups, size, n)])
        for groups in candidates:
            explored += 1
            if explored > budget:
                raise BudgetExceeded(f"more than {budget} partitions")
            h = entropy_of([sum(masses[x] for x in g) for g in groups])
            if h > eps + FEAS_TOL:
                continue
            feasible += 1
            obj = h + key_bits
            if best is None or obj < best[0] - 1e-12:
                best = (obj, h, (r, c), groups)
    if best is None:
        raise EmptyFeasibleSet(f"no separation has revealed entropy <= {eps!r}")
    obj, h, shape, groups = best
    sep = make_separation(probs, _layout(groups, which, n))
    assert sep.shape == shape
    return SearchResult(sep, which, obj, h, sep.key_size(which), feasible, explored,
                        optimal=(mode == "exhaustive"))


def _greedy_groups(masses: list[float], n_groups: int, size: int, n: int) -> list[list[int]]:
    order = sorted(range(n), key=lambda x: (-masses[x], x))
    if len(masses) > n:
        order.append(n)
    groups = [order[g * size:(g + 1) * size] for g in range(n_groups)]

    def h(gs):
        return entropy_of([sum(masses[x] for x in g) for g in gs])

    current = h(groups)
    improved = True
    while improved:
        improved = False
        for a, b in itertools.combinations(range(n_groups), 2):
            for ia, ib in itertools.product(range(size), range(size)):
                xa, xb = groups[a][ia], groups[b][ib]
                if n in (xa, xb) and len(masses) > n:
                    continue
                groups[a][ia], groups[b][ib] = xb, xa
                trial = h(groups)
                if trial < current - 1e-12:
                    current = trial
                    improved = True
                else:
                    groups[a][ia], groups[b][ib] = xa, xb
    return groups

"""Functional representation of Y through an auxiliary variable U.

``build_frl`` produces U independent of X such that Y is a deterministic
function of (U, X).  The construction is the interval one: every realizable
x splits [0, 1) into consecutive intervals of lengths ``P(y|x)`` (in the
fixed label order of Y); the common refinement of all these partitions gives
the cells of U, with ``P(U=u)`` the cell length.  Because the cell lengths do
not depend on x, U is independent of X by construction.

``build_efrl`` adds a revelation component T that equals X with probability
``alpha = eps / H(X)`` and an erasure symbol otherwise, so that
``I(U; X) = eps`` exactly for ``U = (U~, T)``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dist import (
    JointDistribution,
    entropy_of,
    is_deterministic_function,
    mutual_information,
)
from .errors import DegenerateJoint, DegenerateX, EpsOutOfRange, ZeroMassPair

MERGE_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class FrlChannel:
    source: JointDistribution
    edges: np.ndarray
    u_pmf: np.ndarray
    decode_table: np.ndarray  # (nx, n_u) -> y index, -1 for unrealizable x
    cond_u: np.ndarray        # (nx, ny, n_u): P(U=u | X=x, Y=y)

    @property
    def n_u(self) -> int:
        return self.u_pmf.size

    @property
    def u_labels(self) -> tuple:
        return tuple(range(self.n_u))

    @property
    def cells(self) -> list[tuple[float, float]]:
        return list(zip(self.edges[:-1].tolist(), self.edges[1:].tolist()))

    def decode(self, u: int, x: int) -> int:
        return int(self.decode_table[x, u])

    def joint_xyu(self) -> np.ndarray:
        return self.source.pmf[:, :, None] * self.cond_u

    def to_dict(self) -> dict:
        return {
            "kind": "frl",
            "cells": self.cells,
            "u_pmf": self.u_pmf.tolist(),
            "decode_map": self.decode_table.tolist(),
        }


@dataclass(frozen=True, eq=False)
class EfrlChannel:
    """U = (U~, T) with U~ from :func:`build_frl` and T a noisy copy of X.

    U is indexed as ``u = u_tilde * n_t + t`` where ``t < nx`` reveals
    ``X = t`` and ``t == nx`` is the erasure symbol.
    """

    base: FrlChannel
    eps: float
    alpha: float
    regime: str

    @property
    def source(self) -> JointDistribution:
        return self.base.source

    @property
    def n_t(self) -> int:
        return self.source.nx + 1

    @property
    def erasure(self) -> int:
        return self.source.nx

    @property
    def n_u(self) -> int:
        return self.base.n_u * self.n_t

    @property
    def u_labels(self) -> tuple:
        xl = self.source.x_labels
        return tuple((ut, xl[t] if t < len(xl) else None)
                     for ut in range(self.base.n_u) for t in range(self.n_t))

    def _t_given_x(self) -> np.ndarray:
        nx = self.source.nx
        t = np.zeros((nx, self.n_t))
        t[np.arange(nx), np.arange(nx)] = self.alpha
        t[:, self.erasure] += 1.0 - self.alpha
        return t

    @property
    def cond_u(self) -> np.ndarray:
        nx, ny = self.source.nx, self.source.ny
        t = self._t_given_x()
        c = self.base.cond_u[:, :, :, None] * t[:, None, None, :]
        return c.reshape(nx, ny, self.n_u)

    @property
    def u_pmf(self) -> np.ndarray:
        return self.joint_xyu().sum(axis=(0, 1))

    def decode(self, u: int, x: int) -> int:
        return self.base.decode(u // self.n_t, x)

    def joint_xyu(self) -> np.ndarray:
        return self.source.pmf[:, :, None] * self.cond_u

    def to_dict(self) -> dict:
        return {
            "kind": "efrl",
            "eps": self.eps,
            "alpha": self.alpha,
            "regime": self.regime,
            "base": self.base.to_dict(),
        }


def _breakpoints(j: JointDistribution) -> np.ndarray:
    points = []
    for x in j.x_support():
        cdf = np.cumsum(j.cond_y_given_x(x))
        points.extend(cdf[:-1])
    edges = [0.0]
    for p in sorted(points):
        if p <= MERGE_TOL or p >= 1.0 - MERGE_TOL:
            continue
        if p - edges[-1] > MERGE_TOL:
            edges.append(p)
    edges.append(1.0)
    return np.array(edges)


def build_frl(j: JointDistribution) -> FrlChannel:
    xs = j.x_support()
    if xs.size == 0:
        raise DegenerateJoint("no positive-mass X symbol")
    edges = _breakpoints(j)
    lengths = np.diff(edges)
    mids = (edges[:-1] + edges[1:]) / 2
    n_u = lengths.size

    decode = np.full((j.nx, n_u), -1, dtype=int)
    cond = np.zeros((j.nx, j.ny, n_u))
    for x in xs:
        row = j.cond_y_given_x(x)
        cdf = np.cumsum(row)
        cdf[-1] = 1.0
        ys = np.minimum(np.searchsorted(cdf, mids, side="right"), j.ny - 1)
        decode[x] = ys
        for y in np.flatnonzero(row > 0):
            mask = ys == y
            mass = lengths[mask].sum()
            if mass <= 0:
                raise DegenerateJoint(
                    f"P(y={j.y_labels[y]!r}|x={j.x_labels[x]!r}) is below the "
                    f"breakpoint resolution {MERGE_TOL}")
            cond[x, y, mask] = lengths[mask] / mass

    frozen = []
    for arr in (edges, lengths, decode, cond):
        arr.setflags(write=False)
        frozen.append(arr)
    return FrlChannel(j, *frozen)


def build_efrl(j: JointDistribution, eps: float) -> EfrlChannel:
    h_x = entropy_of(j.p_x)
    if eps < 0 or eps > h_x + 1e-12:
        if h_x == 0 and eps > 0:
            raise DegenerateX("H(X) = 0 leaves no room for positive leakage")
        raise EpsOutOfRange(f"eps={eps!r} outside [0, H(X)={h_x!r}]")
    alpha = 0.0 if eps == 0 else min(eps / h_x, 1.0)
    regime = "below_mi" if eps < mutual_information(j) else "at_or_above_mi"
    return EfrlChannel(build_frl(j), float(eps), alpha, regime)


@dataclass(frozen=True)
class CardinalityCertificate:
    bound: int
    actual: int
    functional_case: bool

    @property
    def ok(self) -> bool:
        return self.actual <= self.bound


def cardinality_certificate(channel, j: JointDistribution) -> CardinalityCertificate:
    """Compare the realized ``|U|`` with the constructive cardinality bound.

    Alphabet sizes are taken over the supports of X and Y, and ``actual``
    counts the U values with positive probability.
    """
    n_x = j.x_support().size
    n_y = j.y_support().size
    functional = is_deterministic_function(j, "x_of_y")
    bound = n_y - n_x + 1 if functional else n_x * (n_y - 1) + 1
    if isinstance(channel, EfrlChannel):
        bound *= n_x + 1
    actual = int(np.count_nonzero(channel.u_pmf > 0))
    return CardinalityCertificate(bound, actual, functional)


def sample_u(channel, x: int, y: int, rng: np.random.Generator) -> int:
    """Draw U from ``P(U | X=x, Y=y)``; the cell draw precedes the coin flip."""
    j = channel.source
    if j.pmf[x, y] <= 0:
        raise ZeroMassPair(f"P(x={j.x_labels[x]!r}, y={j.y_labels[y]!r}) = 0")
    base = channel.base if isinstance(channel, EfrlChannel) else channel
    probs = base.cond_u[x, y]
    u_tilde = int(rng.choice(probs.size, p=probs))
    if base is channel:
        return u_tilde
    t = x if rng.random() < channel.alpha else channel.erasure
    return u_tilde * channel.n_t + t

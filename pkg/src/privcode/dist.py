"""Finite distributions and exact information measures (all in bits).

A :class:`JointDistribution` holds the matrix ``pmf[x, y] = P(X=x, Y=y)``
together with the symbol labels of both alphabets.  Zero-probability symbols
are kept in the alphabets; ``0 log 0`` is taken as 0 and conditionals given a
zero-probability event contribute nothing.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Any, Sequence

import numpy as np

from .errors import (
    DomainError,
    EmptyAlphabet,
    MassNotOne,
    NegativeMass,
    ParseError,
)

MASS_TOL = 1e-9


def _freeze(arr) -> np.ndarray:
    out = np.array(arr, dtype=float)
    out.setflags(write=False)
    return out


def _hashable(label):
    if isinstance(label, list):
        return tuple(_hashable(v) for v in label)
    return label


def _check_mass(probs: np.ndarray) -> None:
    if probs.size == 0:
        raise EmptyAlphabet("alphabet must contain at least one symbol")
    if not np.all(np.isfinite(probs)):
        raise MassNotOne("probabilities must be finite")
    if np.any(probs < 0):
        raise NegativeMass(f"negative probability {probs.min()!r}")
    total = probs.sum()
    if abs(total - 1.0) > MASS_TOL:
        raise MassNotOne(f"probabilities sum to {total!r}, not 1")


@dataclass(frozen=True, eq=False)
class Pmf:
    labels: tuple
    probs: np.ndarray

    def __post_init__(self):
        probs = _freeze(self.probs)
        if probs.ndim != 1:
            raise DomainError("a pmf is a vector")
        if len(self.labels) != probs.size:
            raise DomainError("labels and probabilities differ in length")
        _check_mass(probs)
        object.__setattr__(self, "labels", tuple(self.labels))
        object.__setattr__(self, "probs", probs)

    def __len__(self):
        return len(self.labels)

    @property
    def support(self) -> np.ndarray:
        return np.flatnonzero(self.probs > 0)


def make_pmf(probs, labels: Sequence | None = None) -> Pmf:
    probs = np.asarray(probs, dtype=float)
    if labels is None:
        labels = range(probs.size)
    return Pmf(tuple(labels), probs)


@dataclass(frozen=True, eq=False)
class JointDistribution:
    """Joint pmf of (X, Y) on finite labelled alphabets."""

    x_labels: tuple
    y_labels: tuple
    pmf: np.ndarray

    @property
    def nx(self) -> int:
        return len(self.x_labels)

    @property
    def ny(self) -> int:
        return len(self.y_labels)

    @property
    def p_x(self) -> np.ndarray:
        return self.pmf.sum(axis=1)

    @property
    def p_y(self) -> np.ndarray:
        return self.pmf.sum(axis=0)

    def marginal_x(self) -> Pmf:
        return Pmf(self.x_labels, self.p_x)

    def marginal_y(self) -> Pmf:
        return Pmf(self.y_labels, self.p_y)

    def x_support(self) -> np.ndarray:
        return np.flatnonzero(self.p_x > 0)

    def y_support(self) -> np.ndarray:
        return np.flatnonzero(self.p_y > 0)

    def cond_y_given_x(self, x: int) -> np.ndarray:
        """Row ``P(Y | X=x)``; all zeros when ``P(X=x) = 0``."""
        px = self.p_x[x]
        if px <= 0:
            return np.zeros(self.ny)
        return self.pmf[x] / px

    def to_dict(self) -> dict:
        return {
            "x_labels": [_jsonable(v) for v in self.x_labels],
            "y_labels": [_jsonable(v) for v in self.y_labels],
            "pmf": self.pmf.tolist(),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict())


def _jsonable(label):
    if isinstance(label, tuple):
        return [_jsonable(v) for v in label]
    if isinstance(label, np.integer):
        return int(label)
    return label


def validate_joint(matrix, x_labels: Sequence | None = None,
                   y_labels: Sequence | None = None) -> JointDistribution:
    """Check a probability matrix and wrap it as a :class:`JointDistribution`.

    Raises :class:`NegativeMass`, :class:`MassNotOne` (``|sum - 1| > 1e-9``)
    or :class:`EmptyAlphabet`.
    """
    pmf = np.array(matrix, dtype=float)
    if pmf.ndim != 2 or pmf.shape[0] == 0 or pmf.shape[1] == 0:
        raise EmptyAlphabet(f"need a non-empty 2-d matrix, got shape {pmf.shape}")
    if x_labels is None:
        x_labels = range(pmf.shape[0])
    if y_labels is None:
        y_labels = range(pmf.shape[1])
    x_labels = tuple(_hashable(v) for v in x_labels)
    y_labels = tuple(_hashable(v) for v in y_labels)
    if (len(x_labels), len(y_labels)) != pmf.shape:
        raise DomainError(
            f"labels ({len(x_labels)}, {len(y_labels)}) do not match matrix {pmf.shape}")
    if len(set(x_labels)) != len(x_labels) or len(set(y_labels)) != len(y_labels):
        raise DomainError("duplicate labels")
    _check_mass(pmf.ravel())
    return JointDistribution(x_labels, y_labels, _freeze(pmf))


def joint_from_dict(obj: Any) -> JointDistribution:
    try:
        return validate_joint(obj["pmf"], obj.get("x_labels"), obj.get("y_labels"))
    except (KeyError, TypeError, AttributeError) as exc:
        raise ParseError(f"not a distribution object: {exc}") from exc


def joint_from_json(text: str) -> JointDistribution:
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"line {exc.lineno}, column {exc.colno}: {exc.msg}") from exc
    return joint_from_dict(obj)


def load_joint(path) -> JointDistribution:
    with open(path, encoding="utf-8") as fh:
        return joint_from_json(fh.read())


# -- information measures ---------------------------------------------------

def entropy_of(probs) -> float:
    """Entropy in bits of an array of probabilities of any shape."""
    p = np.asarray(probs, dtype=float).ravel()
    p = p[p > 0]
    return max(float(-np.sum(p * np.log2(p))), 0.0)


def entropy(p: Pmf | Sequence[float] | np.ndarray) -> float:
    if isinstance(p, Pmf):
        p = p.probs
    return entropy_of(p)


def binary_entropy(a: float) -> float:
    if not 0.0 <= a <= 1.0:
        raise DomainError(f"binary entropy needs 0 <= a <= 1, got {a!r}")
    return entropy_of([a, 1.0 - a])


def conditional_entropy(j: JointDistribution, direction: str = "Y|X") -> float:
    """``H(Y|X)`` (default) or ``H(X|Y)`` for ``direction="X|Y"``."""
    if direction == "Y|X":
        return max(entropy_of(j.pmf) - entropy_of(j.p_x), 0.0)
    if direction == "X|Y":
        return max(entropy_of(j.pmf) - entropy_of(j.p_y), 0.0)
    raise DomainError(f"unknown direction {direction!r}")


@dataclass(frozen=True, eq=False)
class RowEntropies:
    """``H(Y|X=x)`` for every x, with summaries over the realizable ones."""

    values: np.ndarray
    realizable: np.ndarray
    total: float
    minimum: float
    minimum_nonzero: float | None


def per_symbol_conditional_entropies(j: JointDistribution) -> RowEntropies:
    px = j.p_x
    realizable = px > 0
    values = np.array([entropy_of(j.cond_y_given_x(x)) if realizable[x] else 0.0
                       for x in range(j.nx)])
    live = values[realizable]
    nonzero = live[live > 1e-12]
    return RowEntropies(
        values=_freeze(values),
        realizable=realizable,
        total=float(live.sum()),
        minimum=float(live.min()),
        minimum_nonzero=float(nonzero.min()) if nonzero.size else None,
    )


def mutual_information(j: JointDistribution) -> float:
    mi = entropy_of(j.p_x) + entropy_of(j.p_y) - entropy_of(j.pmf)
    return max(mi, 0.0)


def mutual_information_of(pxy) -> float:
    """``I(A;B)`` for a bare 2-d array ``P(a, b)``."""
    pxy = np.asarray(pxy, dtype=float)
    mi = entropy_of(pxy.sum(axis=1)) + entropy_of(pxy.sum(axis=0)) - entropy_of(pxy)
    return max(mi, 0.0)


def is_deterministic_function(j: JointDistribution, direction: str = "x_of_y") -> bool:
    """``x_of_y``: every column has at most one positive entry (X = f(Y)).

    ``y_of_x``: every row has at most one positive entry (Y = g(X)).
    """
    positive = j.pmf > 0
    if direction == "x_of_y":
        return bool(np.all(positive.sum(axis=0) <= 1))
    if direction == "y_of_x":
        return bool(np.all(positive.sum(axis=1) <= 1))
    raise DomainError(f"unknown direction {direction!r}")


# -- four-variable identity -------------------------------------------------

def validate_four_way(arr) -> np.ndarray:
    """Check a joint pmf over (X, Y, W, U) stored as a 4-d array."""
    f = np.array(arr, dtype=float)
    if f.ndim != 4:
        raise DomainError(f"need a 4-d array, got {f.ndim}-d")
    _check_mass(f.ravel())
    return _freeze(f)


def _h(f: np.ndarray, keep: str) -> float:
    # axes: x=0, y=1, w=2, u=3
    axes = tuple(i for i, name in enumerate("xywu") if name not in keep)
    return entropy_of(f.sum(axis=axes)) if axes else entropy_of(f)


def mi_identity_residual(f) -> float:
    """Residual of ``I(U;Y,W) = I(U;X) + H(Y,W|X) - H(Y,W|X,U) - I(X;U|Y,W)``.

    The identity holds for every joint, so the residual is pure round-off.
    """
    f = validate_four_way(f)
    h = lambda keep: _h(f, keep)  # noqa: E731
    lhs = h("u") + h("yw") - h("ywu")
    i_ux = h("u") + h("x") - h("xu")
    h_yw_x = h("xyw") - h("x")
    h_yw_xu = h("xywu") - h("xu")
    i_xu_yw = h("xyw") + h("ywu") - h("xywu") - h("yw")
    return abs(lhs - (i_ux + h_yw_x - h_yw_xu - i_xu_yw))

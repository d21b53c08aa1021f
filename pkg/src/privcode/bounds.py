"""Closed-form lower and upper bounds on the expected codeword length.

Every bound is returned as a :class:`Bound` carrying the value, the value with
ceilings dropped, and whether its hypotheses hold for the given instance.
Cardinality terms (``|X|(|Y|-1)+1`` and ``|Y|-|X|+1``) use the supports of X
and Y; key-size terms use the alphabet or grid size the pad actually spans.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field

import numpy as np

from .coding import fixed_width
from .dist import (
    JointDistribution,
    binary_entropy,
    conditional_entropy,
    entropy_of,
    is_deterministic_function,
    per_symbol_conditional_entropies,
)
from .errors import EmptyFeasibleSet, EpsOutOfRange, NotFunctional
from .separation import (
    Separation,
    SearchResult,
    collapse_to_x1,
    search_separations,
)

TOL = 1e-9


@dataclass(frozen=True)
class Bound:
    value: float | None
    pre_ceiling: float | None = None
    applicable: bool = True
    note: str = ""
    key_size: int | None = None

    def to_dict(self) -> dict:
        return {
            "value": self.value,
            "pre_ceiling": self.pre_ceiling if self.pre_ceiling is not None else self.value,
            "applicable": self.applicable,
            "note": self.note,
            "key_size": self.key_size,
        }


def _na(note: str) -> Bound:
    return Bound(None, None, applicable=False, note=note)


def _log2(v: float) -> float:
    return math.log2(v) if v > 0 else 0.0


def _check_eps(j: JointDistribution, eps: float) -> float:
    h_x = entropy_of(j.p_x)
    if eps < 0 or eps > h_x + 1e-12:
        raise EpsOutOfRange(f"eps={eps!r} outside [0, H(X)={h_x!r}]")
    return h_x


def _supports(j: JointDistribution) -> tuple[int, int]:
    return int(j.x_support().size), int(j.y_support().size)


def max_probability_bound(j: JointDistribution) -> Bound:
    if not is_deterministic_function(j, "x_of_y"):
        return _na("X is not a function of Y")
    return Bound(float(-math.log2(j.p_x.max())))


# -- exact leakage ----------------------------------------------------------

def lower_bounds(j: JointDistribution, eps: float) -> dict[str, Bound]:
    """Lower bounds for codes whose leakage is exactly ``eps``.

    ``min_row_plus_eps`` takes the minimum of ``H(Y|X=x)`` over every
    realizable x; the variant restricted to non-zero values is reported
    alongside but does not enter ``max_lower``.
    """
    _check_eps(j, eps)
    h_yx = conditional_entropy(j, "Y|X")
    h_xy = conditional_entropy(j, "X|Y")
    rows = per_symbol_conditional_entropies(j)
    out = {
        "cond_entropy": Bound(h_yx),
        "min_row_plus_eps": Bound(rows.minimum + eps),
        "min_nonzero_row_plus_eps": (Bound(rows.minimum_nonzero + eps)
                                     if rows.minimum_nonzero is not None
                                     else _na("every H(Y|X=x) is zero")),
        "leakage_adjusted": Bound(h_yx - h_xy + eps),
    }
    out["max_lower"] = Bound(max(out["cond_entropy"].value, out["min_row_plus_eps"].value,
                                 out["leakage_adjusted"].value))
    out["max_probability"] = max_probability_bound(j)
    return out


def eps_private_upper(j: JointDistribution, eps: float) -> dict[str, Bound]:
    """Upper bounds achieved by padding X and coding ``U = (U~, T)``.

    ``fixed_literal`` counts only the ``U~`` cardinality; ``fixed_parseable``
    also spends ``log2(|X|+1)`` bits on the revelation symbol T, which is what
    a fixed-length code for the whole of U needs.
    """
    h_x = _check_eps(j, eps)
    alpha = 0.0 if eps == 0 else min(eps / h_x, 1.0)
    rows = per_symbol_conditional_entropies(j)
    n_x, n_y = _supports(j)
    key = j.nx
    pad, pad_pre = fixed_width(key), _log2(key)
    generic = n_x * (n_y - 1) + 1
    out = {
        "entropy_coded": Bound(rows.total + eps + binary_entropy(alpha) + 1 + pad,
                               rows.total + eps + binary_entropy(alpha) + 1 + pad_pre,
                               key_size=key),
        "fixed_literal": Bound(fixed_width(generic) + pad, _log2(generic) + pad_pre,
                               key_size=key),
        "fixed_parseable": Bound(fixed_width(generic * (n_x + 1)) + pad,
                                 _log2(generic * (n_x + 1)) + pad_pre, key_size=key),
    }
    if is_deterministic_function(j, "x_of_y"):
        card = (n_y - n_x + 1) * (n_x + 1)
        out["functional_fixed"] = Bound(fixed_width(card) + pad, _log2(card) + pad_pre,
                                        key_size=key)
    else:
        out["functional_fixed"] = _na("X is not a function of Y")
    return out


# -- bounded leakage --------------------------------------------------------

def bounded_lower(j: JointDistribution, eps: float) -> dict[str, Bound]:
    _check_eps(j, eps)
    return {
        "cond_gap": Bound(conditional_entropy(j, "Y|X") - conditional_entropy(j, "X|Y")),
        "max_probability": max_probability_bound(j),
    }


def bounded_split_upper(j: JointDistribution, sep: Separation, eps: float) -> dict[str, Bound]:
    """Bounds for a fixed separation: X2 keyed (first three) or X1 keyed (last)."""
    rows = per_symbol_conditional_entropies(j)
    n_x, n_y = _supports(j)
    h1, h2 = sep.h_x1, sep.h_x2
    k2, k1 = sep.n_x2, sep.n_x1
    ok1 = eps >= h1 - TOL
    ok2 = eps >= h2 - TOL
    why1 = "" if ok1 else f"eps below H(X1)={h1:.6g}"
    why2 = "" if ok2 else f"eps below H(X2)={h2:.6g}"
    generic = n_x * (n_y - 1) + 1
    out = {
        "split_entropy_coded": Bound(rows.total + h1 + 2 + fixed_width(k2),
                                     rows.total + h1 + 2 + _log2(k2), ok1, why1, k2),
        "split_fixed": Bound(fixed_width(generic) + fixed_width(k2) + 2 + h1,
                             _log2(generic) + _log2(k2) + 2 + h1, ok1, why1, k2),
    }
    if is_deterministic_function(j, "x_of_y"):
        card = n_y - n_x + 1
        out["split_functional_fixed"] = Bound(
            fixed_width(card) + fixed_width(k2) + 2 + h1,
            _log2(card) + _log2(k2) + 2 + h1, ok1, why1, k2)
    else:
        out["split_functional_fixed"] = _na("X is not a function of Y")
    out["swapped_entropy_coded"] = Bound(rows.total + h2 + 2 + fixed_width(k1),
                                         rows.total + h2 + 2 + _log2(k1), ok2, why2, k1)
    return out


def separation_upper(j: JointDistribution, eps: float, which: str = "S1",
                     mode: str = "exhaustive", budget: int = 10**6):
    """Best bounded-leakage bound over all separations in S1 (or S2).

    Returns ``(bounds, search_result)``; raises :class:`EmptyFeasibleSet`
    when no separation reveals at most ``eps`` bits.
    """
    res = search_separations(j.marginal_x(), eps, which, mode, budget)
    rows = per_symbol_conditional_entropies(j)
    n_x, n_y = _supports(j)
    generic = n_x * (n_y - 1) + 1
    key_pre = _log2(res.key_size)
    obj_pre = res.revealed_entropy + key_pre
    note = "" if res.optimal else "greedy search; may not be the minimum"
    bounds = {
        "best_entropy_coded": Bound(rows.total + 2 + res.objective, rows.total + 2 + obj_pre,
                                    note=note, key_size=res.key_size),
        "best_fixed": Bound(fixed_width(generic) + 2 + res.objective,
                            _log2(generic) + 2 + obj_pre, note=note, key_size=res.key_size),
    }
    return bounds, res


def functional_key_upper(j: JointDistribution, sep: Separation) -> dict[str, Bound]:
    """Zero-leakage bounds with key size ``|X1|`` when X2 is a function of X1."""
    if not sep.x2_is_function_of_x1():
        raise NotFunctional("X2 is not a function of X1 on this grid")
    x1 = collapse_to_x1(j, sep)
    total = per_symbol_conditional_entropies(x1).total
    n_x, n_y = _supports(j)
    k = sep.n_x1
    generic = n_x * (n_y - 1) + 1
    out = {
        "entropy_coded": Bound(total + 1 + fixed_width(k), total + 1 + _log2(k), key_size=k),
        "fixed": Bound(fixed_width(generic) + fixed_width(k) + 1,
                       _log2(generic) + _log2(k) + 1, key_size=k),
    }
    if is_deterministic_function(j, "x_of_y"):
        card = n_y - n_x + 1
        out["functional_fixed"] = Bound(fixed_width(card) + fixed_width(k) + 1,
                                        _log2(card) + _log2(k) + 1, key_size=k)
    else:
        out["functional_fixed"] = _na("X is not a function of Y")
    return out


def nested_separation_upper(j: JointDistribution, sep: Separation, eps: float,
                            mode: str = "exhaustive", budget: int = 10**6):
    """Split X1 itself into (X1', X1'') when X2 = f(X1) and reveal X1'.

    Returns ``(bound, search_result)``.
    """
    if not sep.x2_is_function_of_x1():
        raise NotFunctional("X2 is not a function of X1 on this grid")
    x1 = collapse_to_x1(j, sep)
    res = search_separations(x1.marginal_x(), eps, "S1", mode, budget)
    total = per_symbol_conditional_entropies(x1).total
    bound = Bound(total + 2 + res.objective,
                  total + 2 + res.revealed_entropy + _log2(res.key_size),
                  key_size=res.key_size)
    return bound, res


def perfect_privacy_reference(j: JointDistribution) -> dict[str, Bound]:
    """Zero-leakage bounds with the full key size ``|X|`` (no separation)."""
    rows = per_symbol_conditional_entropies(j)
    n_x, n_y = _supports(j)
    key = j.nx
    generic = n_x * (n_y - 1) + 1
    return {
        "entropy_coded": Bound(rows.total + 1 + fixed_width(key),
                               rows.total + 1 + _log2(key), key_size=key),
        "fixed": Bound(fixed_width(generic) + fixed_width(key) + 1,
                       _log2(generic) + _log2(key) + 1, key_size=key),
    }


def ceil_sum_slack_holds(a: float, b: float) -> bool:
    """``ceil(a) + ceil(b) <= ceil(a + b) + 1``."""
    return math.ceil(a) + math.ceil(b) <= math.ceil(a + b) + 1


# -- report -----------------------------------------------------------------

@dataclass
class BoundsReport:
    eps: float
    lower: dict[str, Bound] = field(default_factory=dict)
    upper: dict[str, Bound] = field(default_factory=dict)
    separations: dict[str, dict] = field(default_factory=dict)

    def max_exact_lower(self) -> float:
        vals = [self.lower[k].value for k in ("max_lower", "max_probability")
                if self.lower[k].applicable]
        return max(vals)

    def max_bounded_lower(self) -> float:
        vals = [b.value for k, b in self.lower.items()
                if k.startswith("bounded.") and b.applicable]
        return max(vals)

    def consistent(self) -> bool:
        """Every applicable upper bound sits above the matching lower bounds."""
        exact = self.max_exact_lower()
        bounded = self.max_bounded_lower()
        for name, b in self.upper.items():
            if not b.applicable:
                continue
            floor = exact if name.startswith("eps_private.") else bounded
            if b.value < floor - TOL:
                return False
        return True

    def to_dict(self) -> dict:
        return {
            "eps": self.eps,
            "lower": {k: v.to_dict() for k, v in self.lower.items()},
            "upper": {k: v.to_dict() for k, v in self.upper.items()},
            "separations": self.separations,
            "consistent": self.consistent(),
        }

    def flat(self) -> dict:
        row = {"eps": self.eps}
        for side in ("lower", "upper"):
            for k, v in getattr(self, side).items():
                row[f"{side}.{k}"] = v.value if v.applicable else ""
        return row

    def to_csv(self) -> str:
        row = self.flat()
        buf = io.StringIO()
        writer = csv.DictWriter(buf, fieldnames=list(row), lineterminator="\n")
        writer.writeheader()
        writer.writerow(row)
        return buf.getvalue()


def _sep_summary(res: SearchResult, labels) -> dict:
    return {
        "shape": list(res.shape),
        "objective": res.objective,
        "revealed_entropy": res.revealed_entropy,
        "key_size": res.key_size,
        "feasible_count": res.feasible_count,
        "optimal": res.optimal,
        "separation": res.separation.to_dict(labels),
    }


def bounds_report(j: JointDistribution, eps: float, separation: Separation | None = None,
                  functional: Separation | None = None, mode: str = "exhaustive",
                  budget: int = 10**6) -> BoundsReport:
    """Evaluate every bound that applies to ``j`` at leakage ``eps``.

    ``separation`` adds the fixed-split bounds; ``functional`` (a grid on
    which X2 is a function of X1) adds the zero-leakage short-key bounds and
    the nested-separation bound.
    """
    rep = BoundsReport(eps=float(eps))
    rep.lower.update(lower_bounds(j, eps))
    rep.lower.update({f"bounded.{k}": v for k, v in bounded_lower(j, eps).items()})
    rep.upper.update({f"eps_private.{k}": v for k, v in eps_private_upper(j, eps).items()})
    rep.upper.update({f"perfect.{k}": v for k, v in perfect_privacy_reference(j).items()})
    if separation is not None:
        rep.upper.update({f"split.{k}": v
                          for k, v in bounded_split_upper(j, separation, eps).items()})
    for which, prefix in (("S1", "separation"), ("S2", "separation_swapped")):
        try:
            b, res = separation_upper(j, eps, which, mode, budget)
        except EmptyFeasibleSet as exc:
            b = {"best_entropy_coded": _na(str(exc)), "best_fixed": _na(str(exc))}
        else:
            rep.separations[which] = _sep_summary(res, j.x_labels)
        rep.upper.update({f"{prefix}.{k}": v for k, v in b.items()})
    if functional is not None:
        rep.upper.update({f"functional_key.{k}": v
                          for k, v in functional_key_upper(j, functional).items()})
        try:
            b, res = nested_separation_upper(j, functional, eps, mode, budget)
        except EmptyFeasibleSet as exc:
            b = _na(str(exc))
        else:
            rep.separations["nested"] = _sep_summary(res, None)
        rep.upper["nested_separation"] = b
    return rep

import math

import numpy as np
import pytest

from conftest import brute_entropy
from privcode.bounds import (
    bounded_lower, bounded_split_upper, bounds_report, ceil_sum_slack_holds,
    eps_private_upper, functional_key_upper, lower_bounds, nested_separation_upper,
    perfect_privacy_reference, separation_upper,
)
from privcode.dist import validate_joint
from privcode.errors import EmptyFeasibleSet, EpsOutOfRange, NotFunctional
from privcode.experiments import binomial_cond_entropy, example1_upper
from privcode.instances import (
    example1_joint, example2_joint, random_functional_instance, random_joint, random_x_of_y,
)
from privcode.separation import make_separation, search_separations

X_EQ_Y = validate_joint(np.diag([0.5, 0.5]))


def test_lower_bounds_x_equals_y():
    lb = lower_bounds(X_EQ_Y, 0.5)
    assert lb["cond_entropy"].value == 0
    assert lb["min_row_plus_eps"].value == 0.5
    assert lb["leakage_adjusted"].value == 0.5
    assert lb["max_probability"].value == 1.0
    assert lb["max_lower"].value == 0.5
    assert not lb["min_nonzero_row_plus_eps"].applicable


def test_lower_bounds_independent():
    j = validate_joint(np.outer([0.3, 0.7], [0.2, 0.3, 0.5]))
    lb = lower_bounds(j, 0.0)
    assert lb["max_lower"].value == pytest.approx(brute_entropy([0.2, 0.3, 0.5]))
    assert not lb["max_probability"].applicable
    gap = bounded_lower(j, 0.0)["cond_gap"].value
    assert gap == pytest.approx(brute_entropy([0.2, 0.3, 0.5]) - brute_entropy([0.3, 0.7]))


def test_uniform_four_max_probability():
    j = validate_joint(np.diag([0.25] * 4))
    assert bounded_lower(j, 0.0)["max_probability"].value == 2.0


def test_eps_private_upper_binary():
    up = eps_private_upper(X_EQ_Y, 0.5)
    assert up["entropy_coded"].value == pytest.approx(3.5)
    up0 = eps_private_upper(X_EQ_Y, 0.0)
    assert up0["entropy_coded"].value == pytest.approx(0 + 1 + 1)


def test_example1_values():
    j = example1_joint(10)
    h = binomial_cond_entropy(10)
    assert h == pytest.approx(7.2936, abs=1e-3)
    lb = lower_bounds(j, 0.5)
    assert lb["leakage_adjusted"].value == pytest.approx(h + 0.5, abs=1e-9)
    assert lb["leakage_adjusted"].value == pytest.approx(7.794, abs=1e-3)
    assert bounded_lower(j, 0.5)["cond_gap"].value == pytest.approx(h, abs=1e-9)
    assert example1_upper(10) == pytest.approx(17.03, abs=1e-2)
    # the closed form drops ceilings from the functional fixed-length bound
    up = eps_private_upper(j, 0.5)["functional_fixed"]
    assert up.pre_ceiling == pytest.approx(example1_upper(10), abs=1e-9)
    assert up.value == 18


def test_fixed_length_bound_with_and_without_revelation_field():
    j = validate_joint([[0.1, 0.2], [0.3, 0.4]])
    up = eps_private_upper(j, 0.3)
    assert up["fixed_literal"].value == math.ceil(math.log2(3)) + 1
    assert up["fixed_parseable"].value == math.ceil(math.log2(9)) + 1
    assert not up["functional_fixed"].applicable


def test_split_bounds_twelve_symbols():
    j = example2_joint()
    sep = search_separations(j.p_x, 0.4025).separation
    b = bounded_split_upper(j, sep, 0.4025)
    assert b["split_entropy_coded"].value == pytest.approx(15.4025, abs=1e-4)
    assert b["split_entropy_coded"].key_size == 2
    assert b["split_fixed"].value == pytest.approx(7.4025, abs=1e-4)
    assert not b["swapped_entropy_coded"].applicable
    low = bounded_split_upper(j, sep, 0.1)
    assert not any(low[k].applicable for k in ("split_entropy_coded", "split_fixed"))


def test_separation_bound_twelve_symbols():
    j = example2_joint()
    b, res = separation_upper(j, 0.4025)
    assert b["best_fixed"].value == pytest.approx(7.4025, abs=1e-4)
    assert b["best_fixed"].key_size == 2
    assert res.shape == (6, 2)
    with pytest.raises(EmptyFeasibleSet):
        separation_upper(validate_joint(np.full((4, 1), 0.25)), 0.0)


def test_perfect_privacy_reference():
    p = perfect_privacy_reference(example2_joint())
    assert p["entropy_coded"].value == 17 and p["entropy_coded"].key_size == 12
    assert p["fixed"].value == 9 and p["fixed"].key_size == 12


def test_functional_key_bounds():
    pmf = np.zeros((4, 2))
    pmf[0, 0] = pmf[3, 1] = 0.5
    j = validate_joint(pmf)
    sep = make_separation(j.p_x, [[0, 1], [2, 3]])
    b = functional_key_upper(j, sep)
    assert b["entropy_coded"].value == 2.0
    assert b["fixed"].value == math.ceil(math.log2(2 * 1 + 1)) + 1 + 1
    assert b["functional_fixed"].value == math.ceil(math.log2(1)) + 1 + 1
    with pytest.raises(NotFunctional):
        functional_key_upper(validate_joint(np.full((4, 2), 1 / 8)),
                             make_separation(np.full(4, 0.25), [[0, 1], [2, 3]]))


def test_nested_separation():
    rng = np.random.default_rng(11)
    for _ in range(5):
        j, sep = random_functional_instance(rng, max_x1=6)
        eps = brute_entropy(j.p_x)
        try:
            bound, res = nested_separation_upper(j, sep, eps)
        except EmptyFeasibleSet:
            continue  # X1 alphabet too small to split further
        rep = bounds_report(j, eps)
        assert bound.value >= rep.max_bounded_lower() - 1e-9
    j, sep = random_functional_instance(np.random.default_rng(0))
    with pytest.raises(EmptyFeasibleSet):
        nested_separation_upper(j, sep, 0.0)


def test_eps_range():
    with pytest.raises(EpsOutOfRange):
        lower_bounds(X_EQ_Y, 1.5)
    with pytest.raises(EpsOutOfRange):
        eps_private_upper(X_EQ_Y, -0.1)


@pytest.mark.parametrize("a, b", [(0.5, 0.5), (1.2, 2.7), (0.0, 0.0), (3.0, 4.0)])
def test_ceil_sum_slack(a, b):
    assert ceil_sum_slack_holds(a, b)


def test_ceil_sum_slack_sweep():
    pairs = np.random.default_rng(0).random((100_000, 2)) * 50
    assert all(ceil_sum_slack_holds(a, b) for a, b in pairs.tolist())


@pytest.mark.parametrize("seed", range(10))
def test_monotone_in_eps(seed):
    rng = np.random.default_rng(seed)
    j = random_joint(rng)
    h_x = brute_entropy(j.p_x)
    grid = np.linspace(0, h_x, 21)
    l2 = [lower_bounds(j, e)["min_row_plus_eps"].value for e in grid]
    l3 = [lower_bounds(j, e)["leakage_adjusted"].value for e in grid]
    ub = [eps_private_upper(j, e)["entropy_coded"].value for e in grid]
    assert all(a <= b + 1e-12 for a, b in zip(l2, l2[1:]))
    assert all(a <= b + 1e-12 for a, b in zip(l3, l3[1:]))
    half = [u for e, u in zip(grid, ub) if e <= h_x / 2 + 1e-12]
    assert all(a <= b + 1e-12 for a, b in zip(half, half[1:]))
    fine = np.linspace(0, h_x, 2001)
    vals = np.array([eps_private_upper(j, e)["entropy_coded"].value for e in fine])
    assert np.max(np.abs(np.diff(vals))) < 0.05


@pytest.mark.parametrize("seed", range(10))
def test_report_consistent(seed):
    rng = np.random.default_rng(seed)
    j = random_x_of_y(rng) if seed % 2 else random_joint(rng)
    rep = bounds_report(j, 0.5 * brute_entropy(j.p_x))
    assert rep.consistent()
    assert rep.upper["eps_private.entropy_coded"].value >= rep.max_exact_lower()


def test_csv_row():
    rep = bounds_report(example2_joint(), 0.4025)
    text = rep.to_csv()
    header, row = text.strip().split("\n")
    assert "upper.separation.best_fixed" in header.split(",")
    assert len(header.split(",")) == len(row.split(","))
    assert rep.to_dict()["separations"]["S1"]["shape"] == [6, 2]

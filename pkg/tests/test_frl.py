import json
import math

import numpy as np
import pytest

from conftest import brute_entropy, brute_mi
from privcode.dist import per_symbol_conditional_entropies, validate_joint, binary_entropy
from privcode.errors import DegenerateX, EpsOutOfRange, ZeroMassPair
from privcode.frl import build_efrl, build_frl, cardinality_certificate, sample_u
from privcode.instances import example1_joint, random_joint, random_x_of_y


def leak(channel):
    return brute_mi(channel.joint_xyu().sum(axis=1))


def test_independent_source_copies_y():
    j = validate_joint(np.outer([0.3, 0.7], [0.5, 0.5]))
    ch = build_frl(j)
    assert ch.cells == [(0.0, 0.5), (0.5, 1.0)]
    np.testing.assert_allclose(ch.u_pmf, [0.5, 0.5])
    for x in range(2):
        assert [ch.decode(u, x) for u in range(2)] == [0, 1]


def test_two_cell_example_by_hand():
    j = validate_joint([[0.5, 0.0], [0.25, 0.25]])
    ch = build_frl(j)
    assert ch.cells == [(0.0, 0.5), (0.5, 1.0)]
    assert ch.decode(0, 0) == 0 and ch.decode(1, 0) == 0
    assert ch.decode(0, 1) == 0 and ch.decode(1, 1) == 1
    # hand table of P(x, y, u)
    expected = np.zeros((2, 2, 2))
    expected[0, 0, 0] = expected[0, 0, 1] = 0.25
    expected[1, 0, 0] = 0.25
    expected[1, 1, 1] = 0.25
    np.testing.assert_allclose(ch.joint_xyu(), expected, atol=1e-15)
    assert brute_mi(expected.sum(axis=1)) == pytest.approx(0.0, abs=1e-15)


def test_example1_cardinality():
    j = example1_joint(10)
    ch = build_frl(j)
    cert = cardinality_certificate(ch, j)
    assert cert.functional_case
    assert cert.bound == 2 ** 10 - 11 + 1 == 1014
    assert cert.actual <= 1014
    assert leak(ch) <= 1e-9


def test_efrl_zero_eps_is_frl():
    j = validate_joint([[0.2, 0.3], [0.4, 0.1]])
    ch = build_efrl(j, 0.0)
    assert ch.alpha == 0.0
    assert leak(ch) <= 1e-12
    assert brute_entropy(ch.u_pmf) == pytest.approx(brute_entropy(ch.base.u_pmf))


def test_efrl_exact_leakage_by_enumeration():
    j = validate_joint(np.diag([0.5, 0.5]))
    ch = build_efrl(j, 0.3)
    assert ch.alpha == pytest.approx(0.3)
    # U~ is a single cell; the (X, T) table with T in {0, 1, erased}
    hand = np.array([[0.15, 0.0, 0.35], [0.0, 0.15, 0.35]])
    assert brute_mi(hand) == pytest.approx(0.3, abs=1e-12)
    assert leak(ch) == pytest.approx(0.3, abs=1e-9)


def test_efrl_full_revelation():
    j = validate_joint([[0.1, 0.2], [0.3, 0.4]])
    h_x = brute_entropy(j.p_x)
    ch = build_efrl(j, h_x)
    assert ch.alpha == pytest.approx(1.0)
    assert leak(ch) == pytest.approx(h_x, abs=1e-9)


def test_efrl_regime_is_recorded():
    j = validate_joint([[0.1, 0.2], [0.3, 0.4]])
    assert build_efrl(j, 0.0).regime == "below_mi"
    assert build_efrl(j, brute_entropy(j.p_x)).regime == "at_or_above_mi"


def test_efrl_errors():
    j = validate_joint([[0.1, 0.2], [0.3, 0.4]])
    with pytest.raises(EpsOutOfRange):
        build_efrl(j, -0.1)
    with pytest.raises(EpsOutOfRange):
        build_efrl(j, 1.5)
    with pytest.raises(DegenerateX):
        build_efrl(validate_joint([[0.5, 0.5]]), 0.1)


@pytest.mark.parametrize("matrix, efrl, bound", [
    ([[0.1, 0.2], [0.3, 0.4]], True, 9),
    ([[0.5, 0.0], [0.0, 0.5]], True, 3),
    ([[0.1, 0.2, 0, 0], [0, 0, 0.3, 0.4]], False, 3),
])
def test_certificate_bounds(matrix, efrl, bound):
    j = validate_joint(matrix)
    ch = build_efrl(j, 0.5) if efrl else build_frl(j)
    cert = cardinality_certificate(ch, j)
    assert cert.bound == bound
    assert cert.ok


def test_sampling_deterministic_cell():
    j = validate_joint([[0.5, 0.0], [0.25, 0.25]])
    ch = build_frl(j)
    rng = np.random.default_rng(0)
    assert {sample_u(ch, 1, 1, rng) for _ in range(50)} == {1}
    assert {sample_u(ch, 1, 0, rng) for _ in range(50)} == {0}


def test_sampling_replays_per_seed():
    j = validate_joint([[0.5, 0.0], [0.25, 0.25]])
    ch = build_efrl(j, 0.4)
    a = [sample_u(ch, 0, 0, np.random.default_rng(42)) for _ in range(5)]
    r1, r2 = np.random.default_rng(42), np.random.default_rng(42)
    assert [sample_u(ch, 0, 0, r1) for _ in range(100)] == \
        [sample_u(ch, 0, 0, r2) for _ in range(100)]
    assert len(set(a)) == 1


def test_sampling_frequencies():
    j = validate_joint([[0.5, 0.0], [0.25, 0.25]])
    ch = build_efrl(j, 0.4)
    rng = np.random.default_rng(7)
    n = 100_000
    draws = np.array([sample_u(ch, 0, 0, rng) for _ in range(n)])
    probs = ch.cond_u[0, 0]
    counts = np.bincount(draws, minlength=probs.size)
    sigma = np.sqrt(n * probs * (1 - probs))
    assert np.all(np.abs(counts - n * probs) <= 3 * sigma + 1e-9)


def test_zero_mass_pair():
    j = validate_joint([[0.5, 0.0], [0.25, 0.25]])
    with pytest.raises(ZeroMassPair):
        sample_u(build_frl(j), 0, 1, np.random.default_rng(0))


def test_channels_serialize():
    j = validate_joint([[0.1, 0.2], [0.3, 0.4]])
    obj = json.loads(json.dumps(build_efrl(j, 0.2).to_dict()))
    assert obj["kind"] == "efrl" and obj["base"]["cells"][0][0] == 0.0


def test_float_collisions_do_not_inflate_cells():
    # 0.1 + 0.2 != 0.3 in floating point; both rows break at "0.3"
    j = validate_joint(np.array([[0.1, 0.2, 0.7], [0.3, 0.0, 0.7]]) / 2)
    ch = build_frl(j)
    assert ch.n_u == 3


@pytest.mark.parametrize("seed", range(40))
def test_random_invariants(seed):
    rng = np.random.default_rng(seed)
    j = random_joint(rng) if seed % 2 else random_x_of_y(rng)
    rows = per_symbol_conditional_entropies(j)
    ch = build_frl(j)
    xyu = ch.joint_xyu()
    assert leak(ch) <= 1e-9
    for x in j.x_support():
        tv = 0.5 * np.abs(ch.cond_u[x].T @ j.cond_y_given_x(x) - ch.u_pmf).sum()
        assert tv <= 1e-9
    assert sum(xyu[x, y, u] for x, y, u in zip(*np.nonzero(xyu))
               if ch.decode(u, x) != y) == 0
    assert brute_entropy(ch.u_pmf) <= rows.total + 1e-9
    assert cardinality_certificate(ch, j).ok

    h_x = brute_entropy(j.p_x)
    for frac in (0.0, 0.25, 0.5, 1.0):
        e = build_efrl(j, frac * h_x)
        assert abs(leak(e) - frac * h_x) <= 1e-9
        joint = e.joint_xyu()
        h_y_given_ux = brute_entropy(joint) - brute_entropy(joint.sum(axis=1))
        assert h_y_given_ux <= 1e-9
        assert brute_entropy(e.u_pmf) <= rows.total + frac * h_x + binary_entropy(e.alpha) + 1e-9
        assert cardinality_certificate(e, j).ok

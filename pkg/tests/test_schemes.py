import json
import math

import numpy as np
import pytest

from conftest import brute_entropy, brute_mi
from privcode.bounds import bounded_split_upper, eps_private_upper, functional_key_upper
from privcode.dist import validate_joint
from privcode.errors import (
    BadSeparation, BudgetExceeded, TruncatedStream, DomainError, KeyOutOfRange, MalformedCodeword,
    NotFunctional, ThresholdNotMet, UnknownSymbol, ZeroMassPair,
)
from privcode.instances import (
    example1_joint, example2_joint, random_functional_instance, random_joint,
    random_split_instance,
)
from privcode.schemes import (
    BUDGET_ENV, audit, build_bounded_split, build_eps_private, build_perfect_functional,
    count_atoms, monte_carlo_leakage, scheme_from_dict,
)
from privcode.separation import make_separation, search_separations


def x_equals_y():
    return validate_joint(np.diag([0.5, 0.5]))


def parity_instance():
    # X = (X1, X2) on a 2x2 grid, X2 = X1, Y = X1
    pmf = np.zeros((4, 2))
    pmf[0, 0] = pmf[3, 1] = 0.5
    j = validate_joint(pmf, [(0, 0), (0, 1), (1, 0), (1, 1)], [0, 1])
    return j, make_separation(j.p_x, [[0, 1], [2, 3]])


def leakage_oracle(scheme):
    """I(C;X) by expanding every (x, y, u, w) atom into its codeword string."""
    j = scheme.source
    inner_of = scheme.to_inner
    cond = scheme.channel.cond_u
    table = {}
    for x in range(j.nx):
        ix = int(inner_of[x])
        for y in range(j.ny):
            for u in np.flatnonzero(cond[ix, y] > 0):
                p = j.pmf[x, y] * cond[ix, y, u]
                for w in range(scheme.key_size):
                    c = scheme._codeword(ix, int(u), w)
                    table[(x, c)] = table.get((x, c), 0.0) + p / scheme.key_size
    words = sorted({c for _, c in table})
    m = np.zeros((j.nx, len(words)))
    for (x, c), p in table.items():
        m[x, words.index(c)] += p
    return brute_mi(m)


def test_eps_private_binary():
    s = build_eps_private(x_equals_y(), 0.5)
    a = audit(s)
    assert s.key_size == 2
    assert a.lossless
    assert a.exact_leakage == pytest.approx(0.5, abs=1e-9)
    assert leakage_oracle(s) == pytest.approx(0.5, abs=1e-9)
    assert a.expected_length <= 3.5 + 1e-9
    assert a.key_length_spread <= 1e-9
    assert a.expected_length >= a.codeword_entropy - 1e-9


def test_eps_zero_is_private():
    j = validate_joint([[0.1, 0.2, 0.1], [0.3, 0.1, 0.2]])
    a = audit(build_eps_private(j, 0.0))
    assert a.exact_leakage <= 1e-9
    assert a.lossless


@pytest.mark.parametrize("seed", range(10))
def test_eps_private_random(seed):
    rng = np.random.default_rng(seed)
    j = random_joint(rng)
    h_x = brute_entropy(j.p_x)
    for frac in (0.0, 0.5, 1.0):
        s = build_eps_private(j, frac * h_x)
        a = audit(s)
        assert a.lossless
        assert abs(a.exact_leakage - frac * h_x) <= 1e-9
        assert a.expected_length <= eps_private_upper(j, frac * h_x)["entropy_coded"].value + 1e-9


def test_fixed_mode_example1():
    j = example1_joint(10)
    s = build_eps_private(j, 0.5, "fixed")
    a = audit(s, check_lossless=False)
    assert a.exact_leakage == pytest.approx(0.5, abs=1e-9)
    # every codeword has the same length; 4 pad bits plus ceil(log2 |U|)
    assert a.expected_length == pytest.approx(4 + math.ceil(math.log2(len(s.u_code.codewords))), abs=1e-9)
    assert a.expected_length <= 18


def test_split_on_twelve_symbols():
    j = example2_joint()
    sep = search_separations(j.p_x, 0.4025).separation
    s = build_bounded_split(j, sep, 0.4025)
    a = audit(s)
    assert s.key_size == 2 < j.nx
    assert a.lossless
    assert a.exact_leakage == pytest.approx(0.4025, abs=1e-4)
    assert a.exact_leakage == pytest.approx(sep.h_x1, abs=1e-9)
    assert a.expected_length <= bounded_split_upper(j, sep, 0.4025)["split_entropy_coded"].value


def test_split_threshold_and_shape_errors():
    j = example2_joint()
    sep = search_separations(j.p_x, 0.4025).separation
    with pytest.raises(ThresholdNotMet):
        build_bounded_split(j, sep, 0.3)
    with pytest.raises(BadSeparation):
        build_bounded_split(j, [list(range(12))], 1.0)
    with pytest.raises(DomainError):
        build_bounded_split(j, sep, 0.5, variant="otp-X3")


def test_swapped_variant_leaks_column_entropy():
    rng = np.random.default_rng(5)
    pmf = rng.dirichlet(np.ones(8)).reshape(4, 2)
    j = validate_joint(pmf)
    sep = make_separation(j.p_x, [[0, 1], [2, 3]])
    s = build_bounded_split(j, sep, sep.h_x2, variant="otp-X1")
    a = audit(s)
    assert s.key_size == 2
    assert a.lossless
    assert a.exact_leakage == pytest.approx(sep.h_x2, abs=1e-9)
    assert leakage_oracle(s) == pytest.approx(sep.h_x2, abs=1e-9)


@pytest.mark.parametrize("seed", range(8))
def test_split_random(seed):
    rng = np.random.default_rng(seed)
    j = random_split_instance(rng)
    res = search_separations(j.p_x, brute_entropy(j.p_x))
    eps = res.separation.h_x1
    s = build_bounded_split(j, res.separation, eps)
    a = audit(s)
    assert a.lossless and s.key_size < j.nx
    assert abs(a.exact_leakage - eps) <= 1e-9


def test_functional_parity():
    j, sep = parity_instance()
    s = build_perfect_functional(j, sep)
    a = audit(s)
    assert s.key_size == 2
    assert a.lossless
    assert a.exact_leakage <= 1e-9
    assert a.expected_length <= 2.0
    assert functional_key_upper(j, sep)["entropy_coded"].value == 2.0


def test_not_functional():
    j = validate_joint(np.full((4, 2), 1 / 8))
    with pytest.raises(NotFunctional):
        build_perfect_functional(j, make_separation(j.p_x, [[0, 1], [2, 3]]))


@pytest.mark.parametrize("seed", range(8))
def test_functional_random(seed):
    j, sep = random_functional_instance(np.random.default_rng(seed))
    s = build_perfect_functional(j, sep)
    a = audit(s)
    assert s.key_size == sep.n_x1
    assert a.lossless and a.exact_leakage <= 1e-9
    assert a.expected_length <= functional_key_upper(j, sep)["entropy_coded"].value + 1e-9


def test_encode_needs_private_symbol_unless_determined():
    j = validate_joint([[0.25, 0.25], [0.25, 0.25]])
    s = build_eps_private(j, 0.0)
    rng = np.random.default_rng(0)
    with pytest.raises(DomainError):
        s.encode(0, 0, rng)
    bits = s.encode(1, 1, rng, x=0)
    assert s.decode(bits, 1) == 1
    s2 = build_eps_private(x_equals_y(), 0.2)
    assert s2.decode(s2.encode(1, 0, rng), 0) == 1


def test_encode_decode_errors():
    s = build_eps_private(x_equals_y(), 0.2)
    rng = np.random.default_rng(0)
    with pytest.raises(UnknownSymbol):
        s.encode(5, 0, rng)
    with pytest.raises(KeyOutOfRange):
        s.encode(0, 2, rng)
    with pytest.raises(KeyOutOfRange):
        s.decode("0", -1)
    with pytest.raises(ZeroMassPair):
        s.encode(0, 0, rng, x=1)
    with pytest.raises(MalformedCodeword):
        s.decode(s.encode(0, 0, rng).bits + "0", 0)


def test_seeded_replay():
    j = example2_joint()
    s = build_bounded_split(j, search_separations(j.p_x, 0.5).separation, 0.5)
    def run(seed):
        rng = np.random.default_rng(seed)
        return [s.encode(y, w, rng, x=x).bits
                for x in j.x_labels for y in j.y_labels for w in range(s.key_size)]
    assert run(42) == run(42)


def test_tampered_pad_field():
    s = build_eps_private(x_equals_y(), 0.3)
    rng = np.random.default_rng(1)
    for y in (0, 1):
        for w in range(2):
            for _ in range(20):
                bits = s.encode(y, w, rng).bits
                flipped = ("1" if bits[0] == "0" else "0") + bits[1:]
                try:
                    assert s.decode(flipped, w) != y
                except MalformedCodeword:
                    pass


def test_tamper_sweep_only_clean_outcomes():
    j = example2_joint()
    s = build_bounded_split(j, search_separations(j.p_x, 0.5).separation, 0.5)
    rng = np.random.default_rng(2)
    for x in j.x_labels:
        for y in j.y_labels:
            bits = s.encode(y, 0, rng, x=x).bits
            for i in range(len(bits)):
                t = bits[:i] + ("1" if bits[i] == "0" else "0") + bits[i + 1:]
                try:
                    assert s.decode(t, 0) in j.y_labels
                except (MalformedCodeword, TruncatedStream):
                    pass


def test_budget(monkeypatch):
    s = build_eps_private(example1_joint(6), 0.5)
    n = count_atoms(s)
    with pytest.raises(BudgetExceeded):
        audit(s, budget=n - 1)
    monkeypatch.setenv(BUDGET_ENV, str(n - 1))
    with pytest.raises(BudgetExceeded):
        audit(s)
    monkeypatch.setenv(BUDGET_ENV, str(n))
    assert audit(s).lossless


def test_descriptor_round_trip():
    j = example2_joint()
    sep = search_separations(j.p_x, 0.5).separation
    for s in (build_eps_private(j, 0.3, "fixed"), build_bounded_split(j, sep, 0.5, "otp-X2"),
              build_perfect_functional(*parity_instance())):
        desc = json.loads(json.dumps(s.to_dict()))
        again = scheme_from_dict(desc)
        assert again.to_dict() == s.to_dict()
        assert audit(again, check_lossless=False).exact_leakage == pytest.approx(
            audit(s, check_lossless=False).exact_leakage, abs=1e-12)


def test_max_codeword_probability():
    j = example1_joint(6)
    a = audit(build_eps_private(j, 0.5))
    assert a.max_codeword_prob <= a.max_x_prob + 1e-12


def test_monte_carlo_agrees_roughly():
    s = build_eps_private(x_equals_y(), 0.5)
    est = monte_carlo_leakage(s, 20000, np.random.default_rng(3))
    assert abs(est - 0.5) < 0.05

"""Keyed two-part codecs and their exact leakage/length audit.

Every codeword has the layout ``[one-time-pad field][revealed field][U field]``:

* the pad field is the keyed part of X, added to the key modulo the key size
  and written with ``ceil(log2 M)`` bits;
* the revealed field (bounded-leakage split only) is a Huffman codeword of the
  low-entropy factor of X, sent in the clear;
* the U field is a prefix (Huffman) or fixed-length codeword of the auxiliary
  variable from :mod:`privcode.frl`.

The decoder parses the fields in order, recovers X with the key, and reads Y
off the decode map of the channel.
"""

from __future__ import annotations

import os
from collections import defaultdict
from dataclasses import dataclass, field

import numpy as np

from .coding import (
    Bitstring,
    PrefixCode,
    fixed_length_code,
    huffman_build,
    otp_decode,
    otp_encode,
    prefix_decode,
    read_fixed,
    write_fixed,
)
from .dist import (
    JointDistribution,
    entropy_of,
    is_deterministic_function,
    mutual_information_of,
)
from .errors import (
    BudgetExceeded,
    DomainError,
    KeyOutOfRange,
    MalformedCodeword,
    NotFunctional,
    ThresholdNotMet,
    UnknownSymbol,
    ZeroMassPair,
)
from .frl import build_efrl, build_frl, sample_u
from .separation import (
    Separation,
    functional_separation,
    lift_separation,
    make_separation,
)

DEFAULT_ATOM_BUDGET = 10**7
BUDGET_ENV = "PRIVCODE_ATOM_BUDGET"
THRESHOLD_TOL = 1e-9

EPS_PRIVATE = "eps_private"
BOUNDED_SPLIT = "bounded_split"
PERFECT_FUNCTIONAL = "perfect_functional"


def atom_budget() -> int:
    return int(os.environ.get(BUDGET_ENV, DEFAULT_ATOM_BUDGET))


@dataclass(eq=False)
class CodecScheme:
    """A built keyed codec.

    ``inner`` is the joint the channel was built on: the source itself, or its
    lift onto a separation grid.  ``keyed[i]`` / ``revealed[i]`` give, for an
    inner X index ``i``, the value sent through the pad and the value sent in
    the clear (``-1`` when there is no revealed field).
    """

    kind: str
    source: JointDistribution
    inner: JointDistribution
    to_inner: np.ndarray
    key_size: int
    keyed: np.ndarray
    revealed: np.ndarray
    revealed_code: PrefixCode | None
    channel: object
    u_code: PrefixCode
    eps: float
    u_mode: str
    variant: str | None = None
    separation: Separation | None = None
    _assemble: dict = field(default_factory=dict, repr=False)

    def __post_init__(self):
        for i in range(self.inner.nx):
            if self.inner.p_x[i] > 0:
                self._assemble[(int(self.keyed[i]), int(self.revealed[i]))] = i

    # -- encoder / decoder --------------------------------------------------

    def _x_index(self, y: int, x) -> int:
        j = self.source
        if x is None:
            if not is_deterministic_function(j, "x_of_y"):
                raise DomainError("X is not a function of Y; pass the private symbol x")
            return int(np.flatnonzero(j.pmf[:, y] > 0)[0])
        try:
            return j.x_labels.index(x)
        except ValueError:
            raise UnknownSymbol(x) from None

    def encode(self, y, w: int, rng: np.random.Generator, x=None) -> Bitstring:
        """Codeword for useful symbol ``y`` under key ``w``.

        The encoder sees the private symbol ``x`` as well; it may be omitted
        when X is a deterministic function of Y.
        """
        j = self.source
        try:
            yi = j.y_labels.index(y)
        except ValueError:
            raise UnknownSymbol(y) from None
        if not 0 <= w < self.key_size:
            raise KeyOutOfRange(f"key {w} outside 0..{self.key_size - 1}")
        xi = self._x_index(yi, x)
        if j.pmf[xi, yi] <= 0:
            raise ZeroMassPair(f"P(x={j.x_labels[xi]!r}, y={y!r}) = 0")
        inner_x = int(self.to_inner[xi])
        u = sample_u(self.channel, inner_x, yi, rng)
        return Bitstring(self._codeword(inner_x, u, w))

    def _codeword(self, inner_x: int, u: int, w: int) -> str:
        m = self.key_size
        bits = write_fixed(otp_encode(int(self.keyed[inner_x]), w, m), m).bits
        if self.revealed_code is not None:
            bits += self.revealed_code.codewords[int(self.revealed[inner_x])]
        return bits + self.u_code.codewords[u]

    def decode(self, bits: Bitstring | str, w: int):
        if not 0 <= w < self.key_size:
            raise KeyOutOfRange(f"key {w} outside 0..{self.key_size - 1}")
        text = str(bits)
        x_tilde, cur = read_fixed(text, 0, self.key_size)
        k = otp_decode(x_tilde, w, self.key_size)
        r = -1
        if self.revealed_code is not None:
            r, cur = prefix_decode(self.revealed_code, text, cur)
        u, cur = prefix_decode(self.u_code, text, cur)
        if cur != len(text):
            raise MalformedCodeword(f"{len(text) - cur} trailing bits")
        inner_x = self._assemble.get((k, r))
        if inner_x is None:
            raise MalformedCodeword(f"fields ({k}, {r}) name no realizable X symbol")
        y = self.channel.decode(u, inner_x)
        if y < 0:
            raise MalformedCodeword("decode map undefined for this X symbol")
        return self.source.y_labels[y]

    # -- description --------------------------------------------------------

    @property
    def fixed_field_bits(self) -> int:
        return (self.key_size - 1).bit_length()

    def to_dict(self) -> dict:
        out = {
            "kind": self.kind,
            "eps": self.eps,
            "key_size": self.key_size,
            "u_mode": self.u_mode,
            "variant": self.variant,
            "source": self.source.to_dict(),
            "separation": (self.separation.to_dict(self.source.x_labels)
                           if self.separation is not None else None),
            "channel": self.channel.to_dict(),
            "u_code": self.u_code.to_dict(),
            "revealed_code": (self.revealed_code.to_dict()
                              if self.revealed_code is not None else None),
        }
        return out


def _u_code(channel, mode: str) -> PrefixCode:
    pmf = channel.u_pmf
    live = [int(u) for u in np.flatnonzero(pmf > 0)]
    if mode == "huffman":
        return huffman_build({u: float(pmf[u]) for u in live})
    if mode == "fixed":
        return fixed_length_code(live)
    raise DomainError(f"unknown U coding mode {mode!r}")


def build_eps_private(j: JointDistribution, eps: float, mode: str = "huffman") -> CodecScheme:
    """Pad X with a key of size ``|X|`` and append the code of ``U = (U~, T)``."""
    channel = build_efrl(j, eps)
    n = j.nx
    ident = np.arange(n)
    return CodecScheme(
        kind=EPS_PRIVATE, source=j, inner=j, to_inner=ident, key_size=n,
        keyed=ident, revealed=np.full(n, -1), revealed_code=None,
        channel=channel, u_code=_u_code(channel, mode), eps=float(eps), u_mode=mode,
    )


def _as_separation(j: JointDistribution, separation) -> Separation:
    if isinstance(separation, Separation):
        return separation
    return make_separation(j.p_x, separation)


def _grid_maps(j: JointDistribution, sep: Separation):
    c = sep.n_x2
    to_inner = np.empty(j.nx, dtype=int)
    for x, (i, k) in sep.cell_of().items():
        to_inner[x] = i * c + k
    cells = np.arange(sep.n_x1 * c)
    return to_inner, cells // c, cells % c


def build_bounded_split(j: JointDistribution, separation, eps: float,
                        variant: str = "otp-X2", mode: str = "huffman") -> CodecScheme:
    """Pad one factor of X, reveal the other through a Huffman code, then code U.

    ``otp-X2`` keys X2 (key size ``|X2|``) and reveals X1, which needs
    ``eps >= H(X1)``; ``otp-X1`` swaps the roles.
    """
    sep = _as_separation(j, separation)
    if variant not in ("otp-X2", "otp-X1"):
        raise DomainError(f"unknown variant {variant!r}")
    needed = sep.h_x1 if variant == "otp-X2" else sep.h_x2
    if eps < needed - THRESHOLD_TOL:
        raise ThresholdNotMet(f"eps={eps!r} below revealed entropy {needed!r}")
    lifted = lift_separation(j, sep)
    to_inner, rows, cols = _grid_maps(j, sep)
    if variant == "otp-X2":
        keyed, revealed, m, rev_pmf = cols, rows, sep.n_x2, sep.row_marginal
    else:
        keyed, revealed, m, rev_pmf = rows, cols, sep.n_x1, sep.col_marginal
    channel = build_frl(lifted)
    return CodecScheme(
        kind=BOUNDED_SPLIT, source=j, inner=lifted, to_inner=to_inner, key_size=m,
        keyed=keyed, revealed=revealed, revealed_code=huffman_build(rev_pmf),
        channel=channel, u_code=_u_code(channel, mode), eps=float(eps), u_mode=mode,
        variant=variant, separation=sep,
    )


def build_perfect_functional(j: JointDistribution, separation=None,
                             mode: str = "huffman") -> CodecScheme:
    """Zero-leakage codec keyed on X1 alone, for grids where X2 = f(X1)."""
    sep = functional_separation(j.p_x) if separation is None else _as_separation(j, separation)
    if not sep.x2_is_function_of_x1():
        raise NotFunctional("some X1 row holds more than one positive-mass X2 value")
    lifted = lift_separation(j, sep)
    to_inner, rows, _ = _grid_maps(j, sep)
    channel = build_frl(lifted)
    return CodecScheme(
        kind=PERFECT_FUNCTIONAL, source=j, inner=lifted, to_inner=to_inner,
        key_size=sep.n_x1, keyed=rows, revealed=np.full(rows.size, -1),
        revealed_code=None, channel=channel, u_code=_u_code(channel, mode),
        eps=0.0, u_mode=mode, separation=sep,
    )


def scheme_from_dict(obj: dict) -> CodecScheme:
    """Rebuild a scheme from :meth:`CodecScheme.to_dict` output."""
    from .dist import joint_from_dict
    from .separation import separation_from_dict

    j = joint_from_dict(obj["source"])
    kind = obj["kind"]
    sep = separation_from_dict(obj["separation"], j) if obj.get("separation") else None
    if kind == EPS_PRIVATE:
        return build_eps_private(j, obj["eps"], obj["u_mode"])
    if kind == BOUNDED_SPLIT:
        return build_bounded_split(j, sep, obj["eps"], obj["variant"], obj["u_mode"])
    if kind == PERFECT_FUNCTIONAL:
        return build_perfect_functional(j, sep, obj["u_mode"])
    raise DomainError(f"unknown scheme kind {kind!r}")


# -- audit ------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class LeakageAudit:
    exact_leakage: float
    per_key_expected_length: np.ndarray
    codeword_entropy: float
    atom_count: int
    support_size: int
    lossless: bool
    lossless_failures: int
    max_codeword_prob: float
    max_x_prob: float

    @property
    def expected_length(self) -> float:
        return float(self.per_key_expected_length.max())

    @property
    def key_length_spread(self) -> float:
        v = self.per_key_expected_length
        return float(v.max() - v.min())

    def to_dict(self) -> dict:
        return {
            "exact_leakage": self.exact_leakage,
            "expected_length": self.expected_length,
            "per_key_expected_length": self.per_key_expected_length.tolist(),
            "codeword_entropy": self.codeword_entropy,
            "atom_count": self.atom_count,
            "support_size": self.support_size,
            "lossless": self.lossless,
            "lossless_failures": self.lossless_failures,
            "max_codeword_prob": self.max_codeword_prob,
            "max_x_prob": self.max_x_prob,
        }


def count_atoms(scheme: CodecScheme) -> int:
    cond = scheme.channel.cond_u
    live = scheme.inner.pmf[:, :, None] * cond > 0
    return int(live.sum()) * scheme.key_size


def audit(scheme: CodecScheme, j: JointDistribution | None = None,
          budget: int | None = None, check_lossless: bool = True) -> LeakageAudit:
    """Exact leakage and per-key lengths by enumerating (x, y, w, U) atoms.

    ``I(C; X)`` is computed from the joint of X and the codeword strings
    themselves, so distinct field tuples that happened to collide as strings
    would show up here.
    """
    j = scheme.source if j is None else j
    budget = atom_budget() if budget is None else budget
    n_atoms = count_atoms(scheme)
    if n_atoms > budget:
        raise BudgetExceeded(f"{n_atoms} atoms exceed the budget of {budget}")

    inner = scheme.inner
    from_inner = {int(i): x for x, i in enumerate(scheme.to_inner)}
    m = scheme.key_size
    joint = inner.pmf[:, :, None] * scheme.channel.cond_u
    xs, ys, us = np.nonzero(joint > 0)
    probs = joint[xs, ys, us]

    width = scheme.fixed_field_bits
    pad_fields = [format(v, f"0{width}b") if width else "" for v in range(m)]
    rev = scheme.revealed_code
    u_words = scheme.u_code.codewords

    index: dict[str, int] = {}
    px_c = defaultdict(float)
    per_key = np.zeros(m)
    owners: dict[tuple[str, int], set] = defaultdict(set)
    for ix, iy, iu, p in zip(xs.tolist(), ys.tolist(), us.tolist(), probs.tolist()):
        tail = (rev.codewords[int(scheme.revealed[ix])] if rev is not None else "") + u_words[iu]
        kx = int(scheme.keyed[ix])
        x = from_inner[ix]
        pw = p / m
        for w in range(m):
            word = pad_fields[(kx + w) % m] + tail
            c = index.setdefault(word, len(index))
            px_c[(x, c)] += pw
            per_key[w] += p * len(word)
            if check_lossless:
                owners[(word, w)].add(iy)

    pxc = np.zeros((j.nx, len(index)))
    for (x, c), p in px_c.items():
        pxc[x, c] += p
    p_c = pxc.sum(axis=0)

    failures = 0
    if check_lossless:
        ylab = scheme.source.y_labels
        for (word, w), ys_set in owners.items():
            if len(ys_set) != 1:
                failures += 1
                continue
            try:
                ok = scheme.decode(word, w) == ylab[next(iter(ys_set))]
            except MalformedCodeword:
                ok = False
            failures += not ok

    return LeakageAudit(
        exact_leakage=mutual_information_of(pxc),
        per_key_expected_length=per_key,
        codeword_entropy=entropy_of(p_c),
        atom_count=n_atoms,
        support_size=len(index),
        lossless=check_lossless and failures == 0,
        lossless_failures=failures,
        max_codeword_prob=float(p_c.max()),
        max_x_prob=float(j.p_x.max()),
    )


def monte_carlo_leakage(scheme: CodecScheme, n: int, rng: np.random.Generator) -> float:
    """Plug-in estimate of ``I(C; X)`` from ``n`` sampled codewords (biased upward)."""
    j = scheme.source
    flat = j.pmf.ravel()
    draws = rng.choice(flat.size, size=n, p=flat / flat.sum())
    counts = defaultdict(int)
    for d in draws.tolist():
        x, y = divmod(d, j.ny)
        w = int(rng.integers(scheme.key_size))
        word = scheme.encode(j.y_labels[y], w, rng, x=j.x_labels[x]).bits
        counts[(x, word)] += 1
    words = {c: i for i, c in enumerate({wd for _, wd in counts})}
    table = np.zeros((j.nx, len(words)))
    for (x, wd), k in counts.items():
        table[x, words[wd]] = k / n
    return mutual_information_of(table)


"""Prefix codes, bitstrings and the modular one-time pad."""

from __future__ import annotations

import base64
import heapq
import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Hashable

import numpy as np

from .dist import Pmf, entropy_of
from .errors import (
    EmptySupport,
    IndexOutOfRange,
    MalformedCodeword,
    TruncatedStream,
    UnknownSymbol,
)


@dataclass(frozen=True)
class Bitstring:
    """Immutable bit sequence kept as a ``'0'/'1'`` string."""

    bits: str = ""

    def __post_init__(self):
        if set(self.bits) - {"0", "1"}:
            raise ValueError("bitstrings hold only '0' and '1'")

    def __len__(self):
        return len(self.bits)

    def __add__(self, other: "Bitstring") -> "Bitstring":
        return Bitstring(self.bits + other.bits)

    def __str__(self):
        return self.bits

    def to_dict(self) -> dict:
        n = len(self.bits)
        padded = self.bits + "0" * (-n % 8)
        raw = int(padded, 2).to_bytes(len(padded) // 8, "big") if padded else b""
        return {"bits": base64.b64encode(raw).decode("ascii"), "len": n}

    @classmethod
    def from_dict(cls, obj: dict) -> "Bitstring":
        raw = base64.b64decode(obj["bits"])
        n = int(obj["len"])
        if n > 8 * len(raw):
            raise TruncatedStream(f"{n} bits declared, {8 * len(raw)} present")
        text = "".join(f"{b:08b}" for b in raw)
        return cls(text[:n])


def fixed_width(m: int) -> int:
    """Bits needed to write any of ``m`` values: ``ceil(log2 m)``."""
    if m < 1:
        raise IndexOutOfRange(f"alphabet size must be positive, got {m}")
    return (m - 1).bit_length()


@dataclass(frozen=True)
class PrefixCode:
    """A prefix-free code table with the pmf it was designed for."""

    codewords: dict
    probs: dict = field(default_factory=dict)

    @property
    def symbols(self) -> list:
        return list(self.codewords)

    @property
    def lengths(self) -> dict:
        return {s: len(w) for s, w in self.codewords.items()}

    @property
    def kraft_sum(self) -> float:
        return sum(2.0 ** -len(w) for w in self.codewords.values())

    @property
    def expected_length(self) -> float:
        return sum(p * len(self.codewords[s]) for s, p in self.probs.items() if p > 0)

    @cached_property
    def max_length(self) -> int:
        return max(len(w) for w in self.codewords.values())

    @cached_property
    def decode_table(self) -> dict:
        return {w: s for s, w in self.codewords.items()}

    def is_prefix_free(self) -> bool:
        words = sorted(self.codewords.values())
        return all(not b.startswith(a) for a, b in zip(words, words[1:]))

    def to_dict(self) -> dict:
        return {"codewords": [[s, w] for s, w in self.codewords.items()]}


def huffman_build(p: Pmf | dict) -> PrefixCode:
    """Optimal binary prefix code for the positive-mass symbols of ``p``.

    Ties between equal weights go to the subtree holding the smallest symbol
    index, then to the earlier merge.  A single-symbol support gets the empty
    codeword.
    """
    if isinstance(p, Pmf):
        items = list(zip(p.labels, p.probs.tolist()))
    else:
        items = list(p.items())
    live = [(i, s, q) for i, (s, q) in enumerate(items) if q > 0]
    if not live:
        raise EmptySupport("no symbol with positive probability")
    probs = {s: q for _, s, q in live}
    if len(live) == 1:
        return PrefixCode({live[0][1]: ""}, probs)

    heap = [(q, i, i, [i]) for i, _, q in live]
    heapq.heapify(heap)
    depth = {i: 0 for i, _, _ in live}
    order = len(items)
    while len(heap) > 1:
        q1, m1, _, g1 = heapq.heappop(heap)
        q2, m2, _, g2 = heapq.heappop(heap)
        for i in g1 + g2:
            depth[i] += 1
        heapq.heappush(heap, (q1 + q2, min(m1, m2), order, g1 + g2))
        order += 1
    return PrefixCode(canonical_codewords(
        {items[i][0]: depth[i] for i, _, _ in live}, order=[s for _, s, _ in live]), probs)


def canonical_codewords(lengths: dict, order: list | None = None) -> dict:
    """Canonical prefix code for a Kraft-feasible length assignment."""
    order = list(lengths) if order is None else order
    ranked = sorted(order, key=lambda s: (lengths[s], order.index(s)))
    words = {}
    code = 0
    prev = 0
    for s in ranked:
        n = lengths[s]
        code <<= n - prev
        words[s] = format(code, f"0{n}b") if n else ""
        code += 1
        prev = n
    return {s: words[s] for s in order}


def prefix_encode(code: PrefixCode, symbol: Hashable) -> Bitstring:
    try:
        return Bitstring(code.codewords[symbol])
    except KeyError:
        raise UnknownSymbol(symbol) from None


def prefix_decode(code: PrefixCode, bits: Bitstring | str, cursor: int = 0):
    """Read one codeword at ``cursor``; returns ``(symbol, new_cursor)``."""
    text = str(bits)
    lookup = code.decode_table
    longest = code.max_length
    for end in range(cursor, cursor + longest + 1):
        if end > len(text):
            raise TruncatedStream(f"stream ends inside a codeword at bit {cursor}")
        sym = lookup.get(text[cursor:end], _MISSING)
        if sym is not _MISSING:
            return sym, end
    raise MalformedCodeword(f"no codeword matches at bit {cursor}")


_MISSING = object()


def entropy_gap(code: PrefixCode) -> float:
    """``E[L] - H`` under the design pmf."""
    return code.expected_length - entropy_of(np.array(list(code.probs.values())))


# -- one-time pad -----------------------------------------------------------

def _check_index(v: int, m: int, what: str) -> None:
    if not 0 <= v < m:
        raise IndexOutOfRange(f"{what}={v} outside 0..{m - 1}")


def otp_encode(x: int, w: int, m: int) -> int:
    _check_index(x, m, "x")
    _check_index(w, m, "w")
    return (x + w) % m


def otp_decode(x_tilde: int, w: int, m: int) -> int:
    _check_index(x_tilde, m, "x_tilde")
    _check_index(w, m, "w")
    return (x_tilde - w) % m


def write_fixed(value: int, m: int) -> Bitstring:
    """Fixed ``ceil(log2 m)``-bit field holding ``value`` in ``0..m-1``."""
    _check_index(value, m, "value")
    n = fixed_width(m)
    return Bitstring(format(value, f"0{n}b") if n else "")


def read_fixed(bits: Bitstring | str, cursor: int, m: int) -> tuple[int, int]:
    text = str(bits)
    n = fixed_width(m)
    if cursor + n > len(text):
        raise TruncatedStream(f"need {n} bits at {cursor}, have {len(text) - cursor}")
    value = int(text[cursor:cursor + n], 2) if n else 0
    if value >= m:
        raise MalformedCodeword(f"fixed field value {value} >= alphabet size {m}")
    return value, cursor + n


def fixed_length_code(symbols: list) -> PrefixCode:
    """Equal-length code over ``symbols`` (``ceil(log2 n)`` bits each)."""
    if not symbols:
        raise EmptySupport("no symbols")
    n = fixed_width(len(symbols))
    return PrefixCode({s: format(i, f"0{n}b") if n else "" for i, s in enumerate(symbols)})


def ceil_log2(n: float) -> int:
    return math.ceil(math.log2(n)) if n > 1 else 0

"""
Encoding and decoding one symbol at a time
==========================================

A small joint where X is a noisy view of Y.  We encode a few symbols under
random keys, show the codeword fields, and decode them back.
"""

import numpy as np

from privcode import build_eps_private, validate_joint
from privcode.errors import MalformedCodeword

j = validate_joint([[0.30, 0.10, 0.05],
                    [0.05, 0.15, 0.35]],
                   x_labels=["low", "high"], y_labels=["a", "b", "c"])
scheme = build_eps_private(j, eps=0.2)
rng = np.random.default_rng(7)

print("key size:", scheme.key_size, "| pad field bits:", scheme.fixed_field_bits)
for x, y in [("low", "a"), ("high", "c"), ("high", "b")]:
    w = int(rng.integers(scheme.key_size))
    bits = scheme.encode(y, w, rng, x=x)
    pad, rest = bits.bits[:scheme.fixed_field_bits], bits.bits[scheme.fixed_field_bits:]
    print(f"x={x:4s} y={y} key={w}  pad={pad} aux={rest or '-':8s} -> {scheme.decode(bits, w)}")

# decoding with the wrong key still parses, but gives the wrong symbol or fails
bits = scheme.encode("a", 0, rng, x="low")
try:
    print("wrong key decodes to", scheme.decode(bits, 1))
except MalformedCodeword as exc:
    print("wrong key:", exc)

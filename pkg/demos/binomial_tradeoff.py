"""
Length versus leakage on a binomial source
==========================================

Y is a string of n fair coin flips and X counts the ones.  We build the
padded two-part codec at several leakage levels and compare its audited
expected length with the closed-form floor and ceiling.
"""

import numpy as np

from privcode import audit, build_eps_private, lower_bounds, eps_private_upper
from privcode.instances import example1_joint

n = 8
j = example1_joint(n)
h_x = float(-(j.p_x * np.log2(j.p_x)).sum())
print(f"n={n}: |X|={j.nx}, |Y|={j.ny}, H(X)={h_x:.4f}")

# sweep the leakage from zero up to full revelation of X
for eps in np.linspace(0, h_x, 5):
    scheme = build_eps_private(j, eps)
    a = audit(scheme)
    low = lower_bounds(j, eps)["max_lower"].value
    up = eps_private_upper(j, eps)["entropy_coded"].value
    print(f"eps={eps:6.3f}  I(C;X)={a.exact_leakage:6.3f}  "
          f"{low:7.3f} <= E[L]={a.expected_length:7.3f} <= {up:7.3f}")

# H(Y|X)/n creeps toward one bit per flip
from privcode import conditional_entropy
for m in (2, 4, 8, 12):
    print(m, conditional_entropy(example1_joint(m)) / m)

"""Keyed variable-length compression with controlled leakage about private data.

The package builds two-part codes (a one-time-padded private part followed by
a prefix-coded auxiliary variable), evaluates closed-form bounds on their
expected length, and audits built codes exactly by enumeration.
"""

from .bounds import (
    Bound,
    BoundsReport,
    bounded_lower,
    bounded_split_upper,
    bounds_report,
    ceil_sum_slack_holds,
    eps_private_upper,
    functional_key_upper,
    lower_bounds,
    nested_separation_upper,
    perfect_privacy_reference,
    separation_upper,
)
from .coding import (
    Bitstring,
    PrefixCode,
    huffman_build,
    otp_decode,
    otp_encode,
    prefix_decode,
    prefix_encode,
)
from .dist import (
    JointDistribution,
    Pmf,
    binary_entropy,
    conditional_entropy,
    entropy,
    is_deterministic_function,
    load_joint,
    make_pmf,
    mi_identity_residual,
    mutual_information,
    per_symbol_conditional_entropies,
    validate_joint,
)
from .frl import (
    EfrlChannel,
    FrlChannel,
    build_efrl,
    build_frl,
    cardinality_certificate,
    sample_u,
)
from .schemes import (
    CodecScheme,
    LeakageAudit,
    audit,
    build_bounded_split,
    build_eps_private,
    build_perfect_functional,
)
from .separation import (
    Separation,
    enumerate_shapes,
    lift_separation,
    make_separation,
    search_separations,
)

__version__ = "0.1.0"

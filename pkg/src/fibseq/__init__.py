"""Exact arithmetic and truncation-scale verdicts for Fibonacci difference sequence spaces."""

from .conditions import WitnessSearchConfig
from .duals import DualSetId, c_matrix_entry, d_matrix_entry, dual_membership, dual_set_check
from .errors import (
    ExponentRangeError,
    FibseqError,
    SchemaError,
    UnsupportedMatrixError,
    UnsupportedPairError,
)
from .fib import (
    cassini_residual,
    cassini_substituted,
    fib,
    fib_prefix_sum,
    golden_ratio_error,
    reciprocal_fib_partial_sum,
)
from .matmaps import (
    BUILTINS,
    EMatrices,
    ExplicitMatrix,
    build_e_matrices,
    classify_mapping,
    condition_check,
    parse_matrix,
)
from .seq import (
    ExponentSeq,
    Seq,
    Status,
    TailSpec,
    Verdict,
    exponent_stats,
    parse_exponent_seq,
    parse_seq,
    serialize_seq,
)
from .spaces import SpaceId, classify, g_paranorm, gstar_paranorm, h1, h2
from .transform import basis_expand, basis_vector, fhat_apply, identity_check, inverse_apply

__all__ = [
    "BUILTINS", "DualSetId", "EMatrices", "ExplicitMatrix", "ExponentRangeError", "ExponentSeq",
    "FibseqError", "SchemaError", "Seq", "SpaceId", "Status", "TailSpec", "UnsupportedMatrixError",
    "UnsupportedPairError", "Verdict", "WitnessSearchConfig", "basis_expand", "basis_vector",
    "build_e_matrices", "c_matrix_entry", "cassini_residual", "cassini_substituted", "classify",
    "classify_mapping", "condition_check", "d_matrix_entry", "dual_membership", "dual_set_check",
    "exponent_stats", "fhat_apply", "fib", "fib_prefix_sum", "g_paranorm", "golden_ratio_error",
    "gstar_paranorm", "h1", "h2", "identity_check", "inverse_apply", "parse_exponent_seq",
    "parse_matrix", "parse_seq", "reciprocal_fib_partial_sum", "serialize_seq",
]

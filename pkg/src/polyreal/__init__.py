"""Numerical toolkit for dissipative nD scattering realizations.

Builds the objects behind the restricted von Neumann inequality -- block
symbols, transfer functions, tensor substitutions of commuting tuples --
and certifies the Kaijser-Varopoulos counterexample, including machinery
to refute any candidate dissipative realization of its polynomial.
"""

from .errors import CommutativityError, DimensionError, FormatError, SingularityError
from .matrixcore import (
    DEFAULT_TOL,
    Certificate,
    as_matrix,
    block_assemble,
    is_psd,
    kron,
    operator_norm,
    resolvent_apply,
)
from .polynomial import (
    MultiPoly,
    OperatorTuple,
    SupInterval,
    eval_scalar,
    eval_tuple,
    format_poly,
    load_poly,
    parse_poly,
    row_symbol_sup,
    torus_sup,
)
from .scattering import (
    ScatteringSystem,
    check_dissipative,
    check_realizes,
    gblock,
    load_system,
    load_tuple,
    system_from_dict,
    system_to_dict,
    transfer_eval,
    transfer_taylor,
    zeta_g,
)
from .lft import lft, poly_at_tuple_via_lft, tensor_system, verify_lft_equals_eval
from .kv import (
    KvData,
    block_norm_identity,
    build_kv,
    column_condition,
    kv_polynomial,
    row_condition,
    tensor_contractivity,
    verify_structure,
    violation_norm,
)

__version__ = "0.1.0"

__all__ = [
    "CommutativityError",
    "DimensionError",
    "FormatError",
    "SingularityError",
    "DEFAULT_TOL",
    "Certificate",
    "as_matrix",
    "block_assemble",
    "is_psd",
    "kron",
    "operator_norm",
    "resolvent_apply",
    "MultiPoly",
    "OperatorTuple",
    "SupInterval",
    "eval_scalar",
    "eval_tuple",
    "format_poly",
    "load_poly",
    "parse_poly",
    "row_symbol_sup",
    "torus_sup",
    "ScatteringSystem",
    "check_dissipative",
    "check_realizes",
    "gblock",
    "load_system",
    "load_tuple",
    "system_from_dict",
    "system_to_dict",
    "transfer_eval",
    "transfer_taylor",
    "zeta_g",
    "lft",
    "poly_at_tuple_via_lft",
    "tensor_system",
    "verify_lft_equals_eval",
    "KvData",
    "block_norm_identity",
    "build_kv",
    "column_condition",
    "kv_polynomial",
    "row_condition",
    "tensor_contractivity",
    "verify_structure",
    "violation_norm",
]

"""Exact prime-field toolkit for tensor subrank bounds and decomposition witnesses.

Everything here computes over GF(p) for a word-sized prime p. Randomized
routines take explicit integer seeds and are deterministic given
(seed, modulus, dimensions); reruns reproduce reports bit for bit.
"""

from .field import DEFAULT_MODULUS, FieldSpec, SeededStream, is_prime
from .matrix import Matrix, independent_basis, kron, rank, random_subspace
from .tensor import (
    Tensor,
    diagonal_tensor,
    direct_sum,
    restrict,
    tensor_from_json_dict,
    tensor_kron,
)
from .subspaces import (
    TensorSubspace,
    basis_W_r,
    basis_Y_r,
    lift_subspace,
    sample_X_r,
)
from .bounds import (
    CertifyResult,
    GenericSubrankReport,
    certify_lower,
    certify_lower_from_witness,
    differential_image_rank,
    dim_Cr_upper,
    generic_subrank_estimate,
    lower_bound_formula,
    upper_bound_generic,
)
from .decomp import (
    DecompSpec,
    DecompWitness,
    InconclusiveError,
    blow_up_witness,
    direct_sum_combine,
    random_witness,
    rewrite_spec,
    verify_witness,
    witness_2220_31,
    witness_333,
    witness_from_json_dict,
    witness_order_n,
)
from .oracle import (
    RestrictionCertificate,
    brute_subrank,
    certificate_for_diagonal,
    gap_threshold,
    non_additivity_demo,
    verify_certificate,
)

__version__ = "0.1.0"

__all__ = [
    "DEFAULT_MODULUS",
    "FieldSpec",
    "SeededStream",
    "is_prime",
    "Matrix",
    "rank",
    "kron",
    "independent_basis",
    "random_subspace",
    "Tensor",
    "diagonal_tensor",
    "restrict",
    "direct_sum",
    "tensor_kron",
    "tensor_from_json_dict",
    "TensorSubspace",
    "lift_subspace",
    "basis_W_r",
    "basis_Y_r",
    "sample_X_r",
    "upper_bound_generic",
    "dim_Cr_upper",
    "lower_bound_formula",
    "CertifyResult",
    "certify_lower",
    "certify_lower_from_witness",
    "differential_image_rank",
    "GenericSubrankReport",
    "generic_subrank_estimate",
    "DecompSpec",
    "DecompWitness",
    "InconclusiveError",
    "verify_witness",
    "rewrite_spec",
    "direct_sum_combine",
    "random_witness",
    "witness_2220_31",
    "witness_333",
    "witness_order_n",
    "blow_up_witness",
    "witness_from_json_dict",
    "RestrictionCertificate",
    "verify_certificate",
    "certificate_for_diagonal",
    "brute_subrank",
    "non_additivity_demo",
    "gap_threshold",
]

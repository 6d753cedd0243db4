"""Exact two-way partitioning of order-m affinity tensors via a conic relaxation."""

from .estimator import ConicPartitioner
from .exceptions import FormatError, NumericalFailure
from .hpm import HpmSpec, big_f, expected_tensor, l_matrix, p_from_alpha, theorem1_check
from .solver import SolverConfig, SolveResult, agreement, brute_force, certify, extract_assignment, pgd_solve, solve
from .spectra import AscentConfig, lambda1_constrained, lambda_tmax, lambda_tmin, min_eig_f1
from .tensor import SymmetricTensor, contract, frobenius, identity_tensor, inner, rank_one

__all__ = [
    "ConicPartitioner",
    "FormatError",
    "NumericalFailure",
    "HpmSpec",
    "big_f",
    "expected_tensor",
    "l_matrix",
    "p_from_alpha",
    "theorem1_check",
    "SolverConfig",
    "SolveResult",
    "agreement",
    "brute_force",
    "certify",
    "extract_assignment",
    "pgd_solve",
    "solve",
    "AscentConfig",
    "lambda1_constrained",
    "lambda_tmax",
    "lambda_tmin",
    "min_eig_f1",
    "SymmetricTensor",
    "contract",
    "frobenius",
    "identity_tensor",
    "inner",
    "rank_one",
]

__version__ = "0.1.0"

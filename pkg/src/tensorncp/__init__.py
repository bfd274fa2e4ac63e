"""Structured tensors and tensor nonlinear complementarity problems."""

from .solver import ProblemInstance, SolveOptions, SolveReport, Status, solve, solve_nlp, uniqueness_probe
from .tensor_core import (
    DiagonalizableForm,
    Tensor,
    contract_power,
    from_diagonalizable,
    identity_tensor,
    is_diagonal,
    is_symmetric,
    mode_k_matrix_product,
    mode_k_vector_product,
    new_dense,
    partial_symmetrize_tail,
    symmetrize,
)

__version__ = "0.1.0"

"""Tridiagonal representations of second-order operators and their spectra.

Subpackages by theme: ``polycore`` (exact/float polynomial substrate),
``tdop`` (tridiagonalizable operators and their constructions),
``opfamilies`` (classical polynomial families), ``jacspec`` (Jacobi-operator
spectral tools and quadrature), ``morse`` and ``lame`` (the two worked
pipelines), ``cli`` (command-line entry point), ``verify`` (acceptance
suites).
"""

from .polycore import (
    DegreeLoweringOperator,
    Mode,
    ModeError,
    Polynomial,
    compose,
    derivative_op,
    parse_polynomial,
    q_derivative_op,
    second_derivative_op,
)
from .tdop import (
    MomentInnerProduct,
    SymmetricTridiag,
    TDOperator,
    Tridiagonalization,
    orthogonalize,
    reconstruct_diagonalizer,
    symmetrize,
    tridiagonalize,
    validate_td,
    weight_log_derivative,
)
from .opfamilies import Family, FamilyKind
from .jacspec import JacobiOperator, QuadratureRule, eig_block, golub_welsch, split_blocks
from .morse import MorseModel, build_morse_model
from .lame import LameModel, build_lame_model

__version__ = "0.1.0"
__all__ = [
    "Mode",
    "ModeError",
    "Polynomial",
    "DegreeLoweringOperator",
    "derivative_op",
    "second_derivative_op",
    "q_derivative_op",
    "compose",
    "parse_polynomial",
    "TDOperator",
    "validate_td",
    "Tridiagonalization",
    "tridiagonalize",
    "MomentInnerProduct",
    "orthogonalize",
    "SymmetricTridiag",
    "symmetrize",
    "reconstruct_diagonalizer",
    "weight_log_derivative",
    "Family",
    "FamilyKind",
    "JacobiOperator",
    "QuadratureRule",
    "split_blocks",
    "eig_block",
    "golub_welsch",
    "MorseModel",
    "build_morse_model",
    "LameModel",
    "build_lame_model",
    "__version__",
]

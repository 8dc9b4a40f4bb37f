"""Polynomial potential operators for constant-rank symbols, exact and spectral."""
from .algebra import (
    MultiPoly,
    PolyMatrix,
    exact_rank,
    homogeneity_degree,
    mat_mul,
    mat_transpose,
    poly_eval,
    poly_mul,
    rank_at_point,
)
from .construction import (
    DiffOperator,
    InvalidOperatorError,
    PotentialResult,
    RationalMatrixFunction,
    char_coeffs,
    decell_pseudoinverse_symbolic,
    generic_rank,
    gram,
    homogenize,
    kernel_projection_symbolic,
    potential,
)
from .verification import (
    ExactnessReport,
    constant_rank_scan,
    verify_annihilation,
    verify_exactness,
)

__version__ = "0.1.0"

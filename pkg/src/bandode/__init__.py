"""Exact band-diagonal solver for finite-norm solutions of linear ODEs.

The pipeline: a polynomial-coefficient (or rational-coefficient) operator is
regularized and validated, represented exactly as a band-diagonal matrix
over the Gaussian rationals, its kernel spanned by an exact recursion, and
the square-summable directions extracted by weighted-ratio quasi-minimization
with integer quasi-orthogonalization.  No floating point anywhere.
"""

from .assembly import BandMatrix, PivotError, build, closed_form_leading, expand_column
from .basis import (
    BasisExpansion,
    BasisIndex,
    apply_d,
    apply_lower,
    apply_x,
    eval_d_exact,
    eval_exact,
    eval_psi,
    inv_sort_map,
    sort_map,
)
from .diffop import (
    InvalidOperatorError,
    OdeProblem,
    PolyGR,
    ValidationError,
    ValidationReport,
    clear_denominators,
    make_problem,
    regularize_fuchsian,
    s0,
    transform_coords,
    validate_spaces,
)
from .exact import BigRat, GaussRat, abs_sq, gauss_inv, gauss_mul, parse_gauss, parse_rat
from .extraction import (
    Candidate,
    ConfigurationError,
    WeightProfile,
    extract_l2,
    extract_l2_detailed,
    make_weights,
    omega,
    quasi_orthogonalize,
    sigma,
)
from .kernel import EmptyKernelError, KernelBasis, extend, head_solve, membership_check
from .solution import (
    NormalizationDegenerateError,
    SpectralSolution,
    eval_exact_solution,
    eval_real_grid,
    export_csv,
    normalize,
    normalize_peak,
    ratio_report,
    residual_rows,
    tail_mass,
)

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.1.0"

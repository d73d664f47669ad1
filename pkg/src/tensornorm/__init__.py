"""Maximal singular values and vectors of nonnegative tensors.

Computes the projective norm of a sparse nonnegative tensor with
respect to per-mode Hoelder exponents, together with the maximizing
vector tuple, by a bracketing fixed-point iteration whose lower and
upper bounds tighten monotonically around the answer.  Also ships a
baseline power method, structural admissibility checks, reductions for
partially symmetric eigenproblems, and a brute-force oracle for
desk-scale verification.
"""

from .errors import (
    ConditionViolatedError,
    DegenerateGradientError,
    DualResidualError,
    NegativeEntryError,
    NotPartiallySymmetricError,
    NotWeaklyIrreducibleError,
    NumericalBreakdownError,
    ShapeError,
    TensorFormatError,
    TensorNormError,
    ZeroPartError,
    ZeroTensorError,
)
from .maps import (
    PVector,
    ReducedSingularPair,
    SingularPair,
    drop_mode,
    dual_residuals,
    lift_phi,
    normalized,
    pnorm,
    psi,
    quotient_Q,
    quotient_Qi,
    residual_check,
    s_map,
    s_map_all,
    sigma,
    spectrum_upper_bound,
)
from .oracle import oracle_matrix_2norm, oracle_norm
from .power import solve_pm
from .solver import (
    IterationRecord,
    SolveResult,
    SolverConfig,
    cw_bounds,
    estimate_rate,
    g_step,
    hilbert_metric,
    solve_hgpm,
    uniform_start,
)
from .structure import (
    ModeGraph,
    StructureReport,
    admissible_indices,
    analyze_structure,
    build_graph,
    chosen_index,
    is_irreducible,
    is_weakly_irreducible,
    t_alpha_step,
)
from .symmetry import (
    SymmetryStructure,
    check_partial_symmetry,
    eigen_residuals,
    lift_xi,
    project_zeta,
    solve_eigenproblem,
)
from .tensor import (
    ReducedTupleVector,
    SparseTensor,
    TupleVector,
    evaluate,
    grad_mode,
    grad_mode_substituted,
    read_tensor,
    write_tensor,
)

__version__ = "0.1.0"

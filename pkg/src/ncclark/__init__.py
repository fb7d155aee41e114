"""NC rational functions on matrix tuples and their Clark measures."""

from .errors import (
    ArityError,
    DomainError,
    HeuristicError,
    IterationError,
    NcclarkError,
    ParseError,
    PreconditionError,
    RegularityError,
)
from .nc_linalg import (
    MatrixTuple,
    adjoint_tuple,
    beurling_estimate,
    is_column_isometry,
    is_irreducible,
    is_pure,
    is_row_coisometry,
    is_row_contraction,
    joint_similarity,
    joint_spectral_radius,
    joint_unitary_equivalence,
    krylov_span,
    minimal_invariant_decomposition,
    pencil,
    restrict_tuple,
    row_norm,
    similarity_to_strict_row_contraction,
    transpose_tuple,
    word_eval,
)
from .nc_expr import eval_expr, parse, to_str
from .realization import (
    DescriptorRealization,
    FMRealization,
    coefficients,
    descriptor_eval,
    expr_to_fm,
    fm_equal,
    fock_membership,
    hardy_norm_sq,
    minimize,
    transfer_eval,
)
from .fock import inner_certificate, left_shift_matrices, truncated_gram
from .clark import (
    ClarkSeed,
    cayley,
    clark_family,
    classify,
    herglotz_eval,
    minratreal_fm,
    moebius_normalize,
    moments,
)
from .singularity import (
    boundary_eigencheck,
    boundary_limit,
    coisometric_restrictions,
    commutator_det,
    det_splitting,
    mutual_singularity,
    ncAD_report,
    similarity_locus,
    trace_perturbation_polys,
)
from .sl_det import det_constancy_direct, sl_condition_check

__version__ = "0.1.0"

__all__ = [
    "ArityError",
    "ClarkSeed",
    "DescriptorRealization",
    "DomainError",
    "FMRealization",
    "HeuristicError",
    "IterationError",
    "MatrixTuple",
    "NcclarkError",
    "ParseError",
    "PreconditionError",
    "RegularityError",
    "adjoint_tuple",
    "beurling_estimate",
    "boundary_eigencheck",
    "boundary_limit",
    "cayley",
    "clark_family",
    "classify",
    "coefficients",
    "coisometric_restrictions",
    "commutator_det",
    "descriptor_eval",
    "det_constancy_direct",
    "det_splitting",
    "eval_expr",
    "expr_to_fm",
    "fm_equal",
    "fock_membership",
    "hardy_norm_sq",
    "herglotz_eval",
    "inner_certificate",
    "is_column_isometry",
    "is_irreducible",
    "is_pure",
    "is_row_coisometry",
    "is_row_contraction",
    "joint_similarity",
    "joint_spectral_radius",
    "joint_unitary_equivalence",
    "krylov_span",
    "left_shift_matrices",
    "minimal_invariant_decomposition",
    "minimize",
    "minratreal_fm",
    "moebius_normalize",
    "moments",
    "mutual_singularity",
    "ncAD_report",
    "parse",
    "pencil",
    "restrict_tuple",
    "row_norm",
    "similarity_locus",
    "similarity_to_strict_row_contraction",
    "sl_condition_check",
    "to_str",
    "trace_perturbation_polys",
    "transfer_eval",
    "transpose_tuple",
    "truncated_gram",
    "word_eval",
]

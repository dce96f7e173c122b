"""Closed-form solutions of nuclear norm minimization problems.

Minimizes ``||Z||_*`` under linear equality constraints (``X = AZ``,
``X = XZ``, ``U^T Z V = M`` and ``X = AZB``), with an ADMM oracle and
randomized checks to verify the closed forms independently.
"""

__version__ = "0.1.0"

from .closed_form import (
    MethodTag,
    Partition,
    Solution,
    partition_v,
    shape_interaction_matrix,
    solve_azb,
    solve_lrr,
    solve_lrr_full_row_rank,
    solve_semiorthogonal,
)
from .errors import (
    DimensionMismatch,
    Infeasible,
    IoError,
    MaxIterationsExceeded,
    NoNullSpace,
    NonFiniteInput,
    NotFullRowRank,
    NotSemiOrthogonal,
    NucminError,
    ParseError,
    ZeroDictionary,
)
from .linalg import (
    SkinnySVD,
    Tolerances,
    in_span,
    nuclear_norm,
    numerical_rank,
    orthogonal_complement,
    pseudo_inverse,
    skinny_svd,
)
from .oracle import (
    AdmmParams,
    OracleReport,
    admm_solve_azb,
    admm_solve_lrr,
    check_lemma1,
    check_lemma2,
    feasible_perturbation_lrr,
    feasible_perturbation_semiorthogonal,
    svt_shrink,
)

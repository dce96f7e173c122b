"""Verification battery for a single ``X = A Z`` instance."""

from dataclasses import asdict, dataclass

import numpy as np

from .closed_form import solve_lrr, solve_lrr_full_row_rank
from .errors import NoNullSpace
from .linalg import (
    DEFAULT_TOLERANCES,
    nuclear_norm,
    numerical_rank,
    orthogonal_complement,
    pseudo_inverse,
    relative_distance,
    skinny_svd,
)
from .oracle import AdmmParams, admm_solve_lrr, check_lemma1, check_lemma2, feasible_perturbation_lrr

ADMM_DISTANCE_TOL = 1e-4
IDENTITY_TOL = 1e-8
N_PERTURBATIONS = 100


@dataclass
class Check:
    name: str
    status: str  # pass, fail, vacuous or skipped
    value: float = None
    threshold: float = None
    detail: str = ""

    @property
    def passed(self):
        return self.status != "fail"

    def as_dict(self):
        return asdict(self)


def _bound(name, value, threshold, strict=False):
    ok = value < threshold if strict else value <= threshold
    return Check(name, "pass" if ok else "fail", float(value), threshold)


def verify_lrr(X, A, tol=DEFAULT_TOLERANCES, params=AdmmParams(), seed=0):
    """Run every cross-check on one feasible instance.

    Returns the closed-form :class:`~nucmin.closed_form.Solution` and a list
    of :class:`Check`. Infeasible or zero-dictionary inputs raise the same
    errors as :func:`~nucmin.closed_form.solve_lrr`.
    """
    sol = solve_lrr(X, A, tol)
    Z = np.asarray(sol.minimizer)
    X = np.asarray(X, dtype=np.float64)
    A = np.asarray(A, dtype=np.float64)
    checks = [_bound("closed_form_feasibility", sol.feasibility_residual, tol.feas_tol)]

    report = admm_solve_lrr(X, A, params, reference=Z, tol=tol)
    admm = _bound("admm_distance", report.distance_to_reference, ADMM_DISTANCE_TOL)
    admm.detail = f"iterations={report.iterations} converged={report.converged}"
    if not report.converged:
        admm.status = "fail"
    checks.append(admm)

    checks.append(_bound("pinv_identity", relative_distance(Z, pseudo_inverse(A, tol) @ X), IDENTITY_TOL))

    if numerical_rank(A, tol) == A.shape[0]:
        fast = solve_lrr_full_row_rank(X, A, tol).minimizer
        checks.append(_bound("corollary1_agreement", relative_distance(Z, fast), IDENTITY_TOL))
    else:
        checks.append(Check("corollary1_agreement", "skipped", detail="A is not of full row rank"))

    perturbed = Z
    try:
        margins = []
        for i in range(N_PERTURBATIONS):
            N = feasible_perturbation_lrr(A, Z.shape, seed + i, tol)
            margins.append(nuclear_norm(Z + N) - sol.objective)
            if i == 0:
                perturbed = Z + N
        worst = min(margins)
        checks.append(
            Check("nullspace_perturbation", "pass" if worst > 0 else "fail", worst, 0.0,
                  f"min margin over {N_PERTURBATIONS} unit perturbations")
        )
    except NoNullSpace:
        checks.append(Check("nullspace_perturbation", "vacuous", detail="A has full column rank"))

    # Z* = Va (Va^T Z* Vx) Vx^T, so its norm must equal that of the core block
    Va = skinny_svd(A, tol).V
    Vx = skinny_svd(X, tol).V
    ok = check_lemma1(Va.T @ Z @ Vx, Va, Vx)
    checks.append(Check("lemma1", "pass" if ok else "fail", detail="core block of Z* in row-space bases"))

    # rotate a perturbed feasible point into [Va, Va_perp] coordinates
    Va_perp = orthogonal_complement(Va)
    top = Va.T @ perturbed
    bottom = Va_perp.T @ perturbed
    holds, margin = check_lemma2(top, np.zeros((top.shape[0], 0)), bottom, np.zeros((bottom.shape[0], 0)))
    checks.append(Check("lemma2", "pass" if holds else "fail", margin, 0.0, "block norm minus ||B||_*"))

    return sol, checks, report

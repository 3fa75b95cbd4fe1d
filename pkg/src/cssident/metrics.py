"""Selection quality metrics and the Gram-matrix precision-loss demo.

gamma1 compares the conditioning of the selected block against the best
possible, gamma2 compares the rejected block's projection residual
against the best possible, and tau is the condition number improvement.
Exactly rank-deficient and infinitely ill-conditioned cases are resolved
by an explicit flag instead of a silent NaN:

    gamma2_flag  'ok'               finite ratio
                 'exact-deficiency' numerator and denominator both below
                                    the rank cutoff; gamma2 reported as 1
                 'infinite'         only the denominator vanished
    tau_flag     'ok' | 'undefined' (cond(chi) infinite; tau is None)
"""
from __future__ import annotations

from dataclasses import dataclass, asdict

import numpy as np
import scipy.linalg as sla

from .config import DEFAULT, RESIDUAL_DEFICIENCY_FACTOR, Tolerances
from .css import CssResult, v11_inverse_norm
from .errors import InputDomainError
from .linalg import check_matrix, residual_norm, svd


@dataclass(frozen=True)
class MetricsRecord:
    """Quality metrics of one CssResult plus the raw quantities behind them."""

    algorithm: str
    k: int
    gamma1: float
    gamma2: float
    tau: float | None
    gamma2_flag: str
    tau_flag: str
    sigma_k_chi1: float
    sigma_k_chi: float
    residual: float
    sigma_k_plus_1: float
    cond_chi1: float
    cond_chi: float

    def as_dict(self) -> dict:
        return asdict(self)


def compute_metrics(chi, result: CssResult, tol: Tolerances = DEFAULT) -> MetricsRecord:
    """Evaluate gamma1, gamma2 and tau for ``result`` against ``chi``.

    The factors must actually factor ``chi`` (checked through the
    reconstruction residual).  chi1/chi2 quantities are recomputed from
    the selected columns, independently of the stored factors.
    """
    arr = check_matrix(chi)
    n, p = arr.shape
    k = result.k
    if result.factors.reconstruction_error(arr) > 100 * tol.recon:
        raise InputDomainError("result was not produced from this matrix")
    sigma = svd(arr, tol).sigma
    sigma1 = float(sigma[0])
    cutoff = tol.rank_cutoff(n, sigma1)

    perm = result.perm
    chi1 = arr[:, perm[:k]]
    chi2 = arr[:, perm[k:]]
    s_chi1 = np.linalg.svd(chi1, compute_uv=False)
    sigma_k_chi1 = float(s_chi1[k - 1])
    sigma_k_chi = float(sigma[k - 1])
    sigma_k_plus_1 = float(sigma[k])
    resid = residual_norm(chi1, chi2, tol)

    gamma1 = sigma_k_chi1 / sigma_k_chi if sigma_k_chi > 0 else 1.0

    if sigma_k_plus_1 <= cutoff:
        if resid <= RESIDUAL_DEFICIENCY_FACTOR * np.sqrt(p) * cutoff:
            gamma2, gamma2_flag = 1.0, "exact-deficiency"
        else:
            gamma2, gamma2_flag = float("inf"), "infinite"
    else:
        gamma2, gamma2_flag = resid / sigma_k_plus_1, "ok"

    cond_chi = float("inf") if sigma[-1] <= cutoff else sigma1 / float(sigma[-1])
    cond_chi1 = (
        float("inf") if s_chi1[-1] <= cutoff else float(s_chi1[0] / s_chi1[-1])
    )
    if np.isinf(cond_chi):
        tau, tau_flag = None, "undefined"
    else:
        tau, tau_flag = cond_chi1 / cond_chi, "ok"

    return MetricsRecord(
        algorithm=result.algorithm,
        k=k,
        gamma1=float(gamma1),
        gamma2=float(gamma2),
        tau=None if tau is None else float(tau),
        gamma2_flag=gamma2_flag,
        tau_flag=tau_flag,
        sigma_k_chi1=sigma_k_chi1,
        sigma_k_chi=sigma_k_chi,
        residual=float(resid),
        sigma_k_plus_1=sigma_k_plus_1,
        cond_chi1=cond_chi1,
        cond_chi=float(cond_chi),
    )


@dataclass(frozen=True)
class BoundCheck:
    """One verified inequality: lhs <= rhs + slack (or >=, per ``sense``)."""

    name: str
    satisfied: bool
    lhs: float
    rhs: float
    sense: str  # 'le' or 'ge'
    slack: float


def _check(name, lhs, rhs, sense, slack) -> BoundCheck:
    if sense == "le":
        ok = lhs <= rhs + slack
    else:
        ok = lhs >= rhs - slack
    return BoundCheck(name=name, satisfied=bool(ok), lhs=float(lhs),
                      rhs=float(rhs), sense=sense, slack=float(slack))


def theorem_bound_checks(chi, result: CssResult, f: float | None = None,
                         slack_factor: float = 1e-8,
                         tol: Tolerances = DEFAULT) -> list[BoundCheck]:
    """Evaluate the stated accuracy guarantees for one result.

    Includes singular value interlacing for the final split and the
    algorithm-specific bounds.  ``slack_factor`` scales sigma_1 into an
    absolute tolerance for each inequality.
    """
    arr = check_matrix(chi)
    p = arr.shape[1]
    k = result.k
    sigma = svd(arr, tol).sigma
    slack = slack_factor * float(sigma[0])
    r = result.factors.r
    r11 = r[:k, :k]
    r22 = r[k:, k:]
    s_r11 = np.linalg.svd(r11, compute_uv=False)
    s_r22 = np.linalg.svd(r22, compute_uv=False)
    checks = []
    for j in range(k):
        checks.append(_check(f"interlacing-r11-{j + 1}", s_r11[j], sigma[j],
                             "le", slack))
    for j in range(p - k):
        checks.append(_check(f"interlacing-r22-{j + 1}", s_r22[j], sigma[k + j],
                             "ge", slack))

    alg = result.algorithm
    if alg == "b1":
        checks.append(_check(
            "b1-residual-upper", s_r22[0],
            2.0 ** (p - k - 1) * sigma[k], "le", slack,
        ))
        checks.append(_check(
            "b1-residual-upper-proof-form", s_r22[0],
            np.sqrt(p * (p - k)) * 2.0 ** (p - k - 1) * sigma[k], "le", slack,
        ))
        for ell in range(k + 1, p + 1):
            checks.append(_check(
                f"b1-diag-{ell}", abs(r[ell - 1, ell - 1]),
                np.sqrt(ell) * sigma[ell - 1], "le", slack,
            ))
    elif alg == "b4":
        checks.append(_check(
            "b4-sigmak-lower", s_r11[-1], 2.0 ** (1 - k) * sigma[k - 1],
            "ge", slack,
        ))
        for ell in range(1, k + 1):
            checks.append(_check(
                f"b4-diag-{ell}", abs(r[ell - 1, ell - 1]),
                sigma[ell - 1] / np.sqrt(p - ell + 1), "ge", slack,
            ))
    elif alg == "b3":
        v11_inv = result.extras.get("v11_inv_norm")
        if v11_inv is None:
            v11_inv = v11_inverse_norm(arr, result.perm, k, tol)
        checks.append(_check("b3-v11-inverse-cap", v11_inv, 2.0 ** (k - 1),
                             "le", slack))
        checks.append(_check("b3-sigmak-lower", s_r11[-1], sigma[k - 1] / v11_inv,
                             "ge", slack))
        checks.append(_check("b3-residual-upper", s_r22[0], v11_inv * sigma[k],
                             "le", slack))
    elif alg == "srrqr":
        fval = f if f is not None else result.extras.get("f", 1.0)
        factor = np.sqrt(1.0 + fval * fval * k * (p - k))
        for i in range(k):
            checks.append(_check(
                f"srrqr-sigma-lower-{i + 1}", s_r11[i], sigma[i] / factor,
                "ge", slack,
            ))
        for j in range(p - k):
            checks.append(_check(
                f"srrqr-sigma-upper-{j + 1}", s_r22[j], sigma[k + j] * factor,
                "le", slack,
            ))
        coupling = sla.solve_triangular(r11, r[:k, k:]) if p > k else np.zeros((k, 0))
        max_entry = float(np.max(np.abs(coupling))) if coupling.size else 0.0
        delta = 1e-12
        checks.append(_check("srrqr-coupling-cap", max_entry,
                             fval * (1.0 + delta), "le", 1e-9 * fval))
    return checks


@dataclass(frozen=True)
class GramLossReport:
    """Numerical ranks of the precision-loss demo matrix, computed via the
    Gram-matrix eigenvalue route and via the SVD route."""

    matrix: np.ndarray
    gram: np.ndarray
    eta: float
    gram_eigenvalues: np.ndarray
    gram_rank: int
    sigma: np.ndarray
    css_rank: int


def gram_loss_demo(eta: float = 1e-12) -> GramLossReport:
    """Contrast rank detection on [[1,1],[1e-9,0],[0,1e-9]].

    The Gram matrix formed in double precision is exactly singular, so
    the eigenvalue route reports rank 1, while the SVD of the matrix
    itself resolves sigma_2 ~ 1e-9 and reports rank 2 at relative
    threshold eta.  Eigenvalues are squared singular values, so the
    eigenvalue-route threshold is eta^2 * lambda_1.
    """
    chi = np.array([[1.0, 1.0], [1e-9, 0.0], [0.0, 1e-9]])
    gram = chi.T @ chi
    eigvals = np.linalg.eigvalsh(gram)[::-1]
    lam1 = float(eigvals[0])
    gram_rank = int(np.sum(eigvals > eta * eta * lam1)) if lam1 > 0 else 0
    sigma = svd(chi).sigma
    css_rank = int(np.sum(sigma > eta * sigma[0])) if sigma[0] > 0 else 0
    return GramLossReport(
        matrix=chi,
        gram=gram,
        eta=eta,
        gram_eigenvalues=eigvals,
        gram_rank=gram_rank,
        sigma=sigma,
        css_rank=css_rank,
    )

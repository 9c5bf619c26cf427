"""Bounded-real Riccati recursion and the bounded-real LMI certificate."""

from dataclasses import dataclass
from typing import Optional

import numpy as np
import scipy.linalg
import structlog

from ..config import get_settings
from ..errors import ValidationError
from ..models import StateSpaceModel
from ..systems.sslib import require_schur

logger = structlog.get_logger()


@dataclass
class RiccatiResult:
    feasible: bool
    X: Optional[np.ndarray]  # fixed point of the recursion (unscaled)
    iterations: int
    reason: str = ""


@dataclass
class BrlCertificate:
    """Outcome of a bounded-real check at level gamma."""
    feasible: bool
    gamma: float
    P: Optional[np.ndarray] = None   # LMI variable, P > 0 when feasible
    max_eigenvalue: float = np.inf   # of the assembled block matrix
    iterations: int = 0
    reason: str = ""


def bounded_real_riccati(A: np.ndarray, B: np.ndarray, C: np.ndarray, D: np.ndarray,
                         gamma: float, tol: Optional[float] = None,
                         max_iter: Optional[int] = None,
                         divergence: Optional[float] = None) -> RiccatiResult:
    """Iterate X⁺ = AᵀXA + CᵀC + LᵀR⁻¹L from X = 0.

    R = γ²I − DᵀD − BᵀXB must stay positive definite and L = BᵀXA + DᵀC.
    For Schur A the iterates increase monotonically to the stabilizing
    solution exactly when γ exceeds the H-infinity norm.
    """
    settings = get_settings()
    tol = settings.riccati_tol if tol is None else tol
    max_iter = settings.riccati_max_iter if max_iter is None else max_iter
    divergence = settings.riccati_divergence if divergence is None else divergence

    n, m = B.shape
    X = np.zeros((n, n))
    gamma_sq = gamma * gamma
    base = C.T @ C
    DtD = D.T @ D
    DtC = D.T @ C
    scale = max(1.0, np.linalg.norm(base, 2))
    for iteration in range(1, max_iter + 1):
        R = gamma_sq * np.eye(m) - DtD - B.T @ X @ B
        try:
            factor = scipy.linalg.cho_factor(R)
        except np.linalg.LinAlgError:
            return RiccatiResult(False, None, iteration, "R lost positive definiteness")
        L = B.T @ X @ A + DtC
        X_next = A.T @ X @ A + base + L.T @ scipy.linalg.cho_solve(factor, L)
        X_next = 0.5 * (X_next + X_next.T)
        step = np.linalg.norm(X_next - X, "fro")
        size = np.linalg.norm(X_next, "fro")
        X = X_next
        if not np.isfinite(size) or size > divergence * scale:
            return RiccatiResult(False, None, iteration, "recursion diverged")
        if step <= tol * max(1.0, size):
            return RiccatiResult(True, X, iteration, "converged")
    return RiccatiResult(False, None, max_iter, "iteration cap reached")


def bounded_real_matrix(A: np.ndarray, B: np.ndarray, C: np.ndarray, D: np.ndarray,
                        P: np.ndarray, gamma: float) -> np.ndarray:
    """The symmetric block matrix

        [ AᵀPA − P   AᵀPB       Cᵀ  ]
        [ BᵀPA       BᵀPB − γI  Dᵀ  ]
        [ C          D          −γI ]

    which is negative definite for some P > 0 iff ‖G‖∞ < γ.
    """
    n, m = B.shape
    p = C.shape[0]
    top = np.hstack([A.T @ P @ A - P, A.T @ P @ B, C.T])
    middle = np.hstack([B.T @ P @ A, B.T @ P @ B - gamma * np.eye(m), D.T])
    bottom = np.hstack([C, D, -gamma * np.eye(p)])
    matrix = np.vstack([top, middle, bottom])
    return 0.5 * (matrix + matrix.T)


def certify_bounded_real(sys: StateSpaceModel, gamma: float, tol: Optional[float] = None,
                         max_iter: Optional[int] = None) -> BrlCertificate:
    """Run the recursion at γ and check the LMI block matrix by eigenvalues.

    The recursion runs with C augmented by sqrt(ε)·I so the fixed point is
    positive definite and the LMI holds strictly.
    """
    if not sys.is_discrete:
        raise ValidationError("bounded-real certificates apply to discrete-time systems")
    if not gamma > 0:
        return BrlCertificate(False, gamma, reason="gamma must be positive")
    require_schur(sys)
    A, B, C, D = sys.A, sys.B, sys.C, sys.D
    n = sys.n_states
    eps = 1e-10 * max(1.0, np.linalg.norm(C, 2) ** 2, gamma * gamma)
    C_aug = np.vstack([C, np.sqrt(eps) * np.eye(n)]) if n else C
    D_aug = np.vstack([D, np.zeros((n, D.shape[1]))]) if n else D

    result = bounded_real_riccati(A, B, C_aug, D_aug, gamma, tol=tol, max_iter=max_iter)
    if not result.feasible:
        logger.debug("Bounded-real recursion infeasible", gamma=gamma, reason=result.reason)
        return BrlCertificate(False, gamma, iterations=result.iterations, reason=result.reason)

    P = result.X / gamma
    matrix = bounded_real_matrix(A, B, C, D, P, gamma)
    top = float(np.max(np.linalg.eigvalsh(matrix)))
    threshold = 1e-8 * max(1.0, gamma, np.linalg.norm(P, 2))
    feasible = top <= threshold
    if not feasible:
        logger.warning("LMI check failed after recursion converged", gamma=gamma, max_eigenvalue=top)
    return BrlCertificate(feasible, gamma, P, top, result.iterations,
                          "certified" if feasible else "LMI eigen-check failed")

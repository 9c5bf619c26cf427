"""H-infinity and H2 norms of discrete-time systems."""

from dataclasses import dataclass
from typing import Optional

import numpy as np
import scipy.linalg
import structlog

from ..config import get_settings
from ..errors import BracketError, ValidationError
from ..models import StateSpaceModel
from ..systems.sslib import require_schur, spectral_radius
from .response import evaluate_response, frequency_grid, max_singular_values
from .riccati import BrlCertificate, bounded_real_riccati, certify_bounded_real

logger = structlog.get_logger()

MAX_BRACKET_DOUBLINGS = 60
MARKOV_HORIZON = 4096


@dataclass
class HinfResult:
    gamma: float
    peak_omega: float
    lower_bound: float
    upper_bound: float
    certificate: Optional[BrlCertificate]
    iterations: int

    def __float__(self) -> float:
        return self.gamma


def grid_peak(sys: StateSpaceModel, n_points: int, refinements: int) -> tuple[float, float]:
    """Largest gain over a hybrid grid, refined locally around the argmax."""
    poles = scipy.linalg.eigvals(sys.A) if sys.n_states else None
    grid = frequency_grid(n_points, poles)
    values, flagged = evaluate_response(sys, grid)
    gains = max_singular_values(np.nan_to_num(values))
    gains[flagged] = 0.0
    index = int(np.argmax(gains))
    omega, peak = float(grid[index]), float(gains[index])
    width = np.pi / max(len(grid) - 1, 1)
    for _ in range(refinements):
        local = np.clip(np.linspace(omega - 2 * width, omega + 2 * width, 65), 0.0, np.pi)
        values, flagged = evaluate_response(sys, local)
        gains = max_singular_values(np.nan_to_num(values))
        gains[flagged] = 0.0
        index = int(np.argmax(gains))
        if gains[index] > peak:
            omega, peak = float(local[index]), float(gains[index])
        width /= 16.0
    return omega, peak


def small_gain_bound(sys: StateSpaceModel) -> float:
    """‖D‖ + ‖C‖‖B‖/(1 − r(A)); exact for normal A, used only as a starting bracket."""
    radius = spectral_radius(sys.A)
    bound = np.linalg.norm(sys.D, 2)
    if sys.n_states:
        bound += np.linalg.norm(sys.C, 2) * np.linalg.norm(sys.B, 2) / (1.0 - radius)
    return float(bound)


def markov_bound(sys: StateSpaceModel, horizon: int = MARKOV_HORIZON) -> tuple[float, bool]:
    """‖D‖ + Σ‖CAᵏB‖ and whether the series was summed to negligible tail.

    A converged sum is a rigorous upper bound on the H-infinity norm.
    """
    total = np.linalg.norm(sys.D, 2)
    if sys.n_states == 0:
        return float(total), True
    column = sys.B.copy()
    c_norm = np.linalg.norm(sys.C, 2)
    for _ in range(horizon):
        total += np.linalg.norm(sys.C @ column, 2)
        column = sys.A @ column
        if c_norm * np.linalg.norm(column) <= 1e-16 * max(total, 1e-300):
            return float(total), True
    return float(total), False


def hinf_norm(sys: StateSpaceModel, tol_rel: Optional[float] = None,
              grid_points: Optional[int] = None,
              refinements: Optional[int] = None) -> HinfResult:
    """H-infinity norm by Riccati-feasibility bisection, with a bounded-real certificate.

    The grid maximum is a lower bound; the returned value lies within
    tol_rel (relative) of the true norm.  The certificate is issued at
    γ·(1 + tol_rel).
    """
    settings = get_settings()
    tol_rel = settings.hinf_tol_rel if tol_rel is None else tol_rel
    grid_points = settings.grid_points if grid_points is None else grid_points
    refinements = settings.grid_refinements if refinements is None else refinements
    if not sys.is_discrete:
        raise ValidationError("hinf_norm needs a discrete-time system")
    require_schur(sys)

    if sys.n_states == 0:
        gamma = float(np.linalg.svd(sys.D, compute_uv=False)[0]) if sys.D.size else 0.0
        certificate = certify_bounded_real(sys, gamma * (1 + tol_rel)) if gamma > 0 else None
        return HinfResult(gamma, 0.0, gamma, gamma, certificate, 0)

    peak_omega, lower = grid_peak(sys, grid_points, refinements)
    markov, markov_exact = markov_bound(sys)
    if markov_exact and markov == 0.0:
        return HinfResult(0.0, 0.0, 0.0, 0.0, None, 0)

    def feasible(gamma: float) -> bool:
        return bounded_real_riccati(sys.A, sys.B, sys.C, sys.D, gamma).feasible

    iterations = 0
    lo, hi = lower, None
    trial = lower * (1.0 + tol_rel)
    if trial > 0 and feasible(trial):
        hi = trial
    elif markov_exact and markov <= trial:
        # the recursion is unreliable at this scale; the summed series is not
        hi = markov
    elif markov_exact:
        lo, hi = max(lo, trial), markov
    else:
        lo = max(lo, trial)
        candidate = max(small_gain_bound(sys), markov, lo * (1.0 + tol_rel))
        for _ in range(MAX_BRACKET_DOUBLINGS):
            iterations += 1
            if feasible(candidate):
                hi = candidate
                break
            lo = candidate
            candidate *= 2.0
        if hi is None:
            raise BracketError(f"no feasible upper bound found up to {candidate:.3g}")

    floor = 1e-300
    while hi - lo > tol_rel * max(lo, floor) and hi - lo > 1e-15 * hi:
        iterations += 1
        mid = 0.5 * (lo + hi)
        if feasible(mid):
            hi = mid
        else:
            lo = mid

    gamma = 0.5 * (lo + hi)
    certificate = certify_bounded_real(sys, gamma * (1.0 + tol_rel))
    logger.debug("hinf_norm converged", gamma=gamma, peak_omega=peak_omega,
                 iterations=iterations, certified=certificate.feasible)
    return HinfResult(gamma, peak_omega, lower, hi, certificate, iterations)


def h2_norm(sys: StateSpaceModel) -> float:
    """sqrt(trace(C W Cᵀ) + trace(DᵀD)) with W the controllability Gramian."""
    if not sys.is_discrete:
        raise ValidationError("h2_norm needs a discrete-time system")
    require_schur(sys)
    total = float(np.sum(sys.D ** 2))
    if sys.n_states:
        gramian = scipy.linalg.solve_discrete_lyapunov(sys.A, sys.B @ sys.B.T)
        total += float(np.trace(sys.C @ gramian @ sys.C.T))
    return float(np.sqrt(max(total, 0.0)))

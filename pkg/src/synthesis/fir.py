"""H-infinity optimal FIR synthesis for one-block generalized plants.

The closed loop T(α) = G11 + G12·K(α)·G21 is affine in the taps α, so
max_ω σ_max(T(e^{jω}; α)) is convex.  The semi-infinite minimax is solved
on an adaptive frequency grid:

  inner loop   minimize the grid maximum (Kelley cutting planes in a trust
               region, solved by HiGHS, then a Polyak subgradient polish;
               or the pure Polyak method)
  outer loop   certify the iterate with hinf_norm and add the true peak
               frequency to the grid until both numbers agree.
"""

from dataclasses import dataclass, field
from typing import Optional

import numpy as np
import structlog
from scipy.optimize import linprog

from ..analysis.norms import hinf_norm
from ..analysis.response import evaluate_response, frequency_grid
from ..config import get_settings
from ..errors import ValidationError
from ..models import DesignReport, FirFilter, InnerSolver
from .plant import GeneralizedPlant, affine_closed_loop

logger = structlog.get_logger()

PEAKS_PER_ITERATION = 8
CUT_ROTATIONS = (np.pi / 6, -np.pi / 6)
LOWER_BOUND_EVERY = 5
POLISH_ITERATIONS = 200
LP_OPTIONS = {"primal_feasibility_tolerance": 1e-10, "dual_feasibility_tolerance": 1e-10}


@dataclass
class SynthesisOptions:
    gap_rel: float = field(default_factory=lambda: get_settings().synthesis_gap_rel)
    max_outer: int = field(default_factory=lambda: get_settings().synthesis_max_outer)
    max_inner: int = field(default_factory=lambda: get_settings().synthesis_max_inner)
    grid_points: int = field(default_factory=lambda: get_settings().grid_points)
    tol_rel: float = field(default_factory=lambda: get_settings().hinf_tol_rel)
    polyak_max_iter: int = field(default_factory=lambda: get_settings().polyak_max_iter)
    inner_solver: InnerSolver = InnerSolver.CUTTING_PLANE
    initial: Optional[FirFilter] = None
    box: float = 1e3  # |α| bound of the global lower-bound LP, grown on contact


class _GridModel:
    """Plant blocks sampled on the current grid."""

    def __init__(self, plant: GeneralizedPlant, order: int, omegas: np.ndarray):
        self.plant = plant
        self.order = order
        self.omegas = np.zeros(0)
        self.g11 = np.zeros((0, plant.n_z, plant.n_w), dtype=complex)
        self.g12 = np.zeros((0, plant.n_z, plant.n_u), dtype=complex)
        self.g21 = np.zeros((0, plant.n_y, plant.n_w), dtype=complex)
        self.add(omegas)

    def add(self, omegas: np.ndarray) -> None:
        new = np.setdiff1d(np.asarray(omegas, dtype=float), self.omegas)
        if new.size == 0:
            return
        blocks = []
        for block in (self.plant.g11, self.plant.g12, self.plant.g21):
            values, flagged = evaluate_response(block, new)
            if np.any(flagged):
                raise ValidationError("plant block evaluated on its own pole; blocks must be Schur")
            blocks.append(values)
        omegas = np.concatenate([self.omegas, new])
        order = np.argsort(omegas)
        self.omegas = omegas[order]
        self.g11 = np.concatenate([self.g11, blocks[0]])[order]
        self.g12 = np.concatenate([self.g12, blocks[1]])[order]
        self.g21 = np.concatenate([self.g21, blocks[2]])[order]
        self.phases = np.exp(-1j * np.outer(self.omegas, np.arange(self.order + 1)))

    def closed_loop(self, alpha: np.ndarray) -> np.ndarray:
        taps = alpha.reshape(self.order + 1, self.plant.n_u, self.plant.n_y)
        k_hat = np.einsum("wk,kij->wij", self.phases, taps)
        return self.g11 + self.g12 @ k_hat @ self.g21

    def gains(self, alpha: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        T = self.closed_loop(alpha)
        return T, np.linalg.svd(T, compute_uv=False)[:, 0]

    def cut(self, index: int, u: np.ndarray, v: np.ndarray) -> tuple[np.ndarray, float]:
        """Linear minorant α ↦ Re(u* T(ω_index; α) v) as (gradient, offset)."""
        left = u.conj() @ self.g12[index]      # (n_u,)
        right = self.g21[index] @ v            # (n_y,)
        outer = np.einsum("k,i,j->kij", self.phases[index], left, right)
        offset = float(np.real(u.conj() @ self.g11[index] @ v))
        return np.real(outer).reshape(-1), offset


def _local_maxima(gains: np.ndarray, count: int) -> np.ndarray:
    padded = np.concatenate([[-np.inf], gains, [-np.inf]])
    mask = (padded[1:-1] >= padded[:-2]) & (padded[1:-1] >= padded[2:])
    candidates = np.flatnonzero(mask)
    ranked = candidates[np.argsort(-gains[candidates], kind="stable")]
    return ranked[:count]


def _subgradient(model: _GridModel, T: np.ndarray, gains: np.ndarray) -> np.ndarray:
    index = int(np.argmax(gains))
    U, _, Vh = np.linalg.svd(T[index])
    gradient, _ = model.cut(index, U[:, 0], Vh[0].conj())
    return gradient


class _CuttingPlaneSolver:
    """Kelley cuts with a trust region around the best iterate."""

    def __init__(self, model: _GridModel, box: float):
        self.model = model
        self.box = box
        self.gradients: list[np.ndarray] = []
        self.offsets: list[float] = []
        self.lower_bound = 0.0

    def add_cuts(self, T: np.ndarray, gains: np.ndarray) -> None:
        for index in _local_maxima(gains, PEAKS_PER_ITERATION):
            U, s, Vh = np.linalg.svd(T[index])
            pairs = [0] + ([1] if s.size > 1 and s[1] > 0.9 * s[0] else [])
            for r in pairs:
                u, v = U[:, r], Vh[r].conj()
                gradient, offset = self.model.cut(index, u, v)
                self.gradients.append(gradient)
                self.offsets.append(offset)
                for theta in CUT_ROTATIONS:
                    gradient, offset = self.model.cut(index, np.exp(-1j * theta) * u, v)
                    self.gradients.append(gradient)
                    self.offsets.append(offset)

    def solve_lp(self, lower: np.ndarray, upper: np.ndarray) -> Optional[tuple[np.ndarray, float]]:
        G = np.asarray(self.gradients)
        A_ub = np.hstack([G, -np.ones((G.shape[0], 1))])
        b_ub = -np.asarray(self.offsets)
        bounds = list(zip(lower, upper)) + [(0.0, None)]
        cost = np.zeros(G.shape[1] + 1)
        cost[-1] = 1.0
        result = linprog(cost, A_ub=A_ub, b_ub=b_ub, bounds=bounds, method="highs",
                         options=LP_OPTIONS)
        if result.status != 0:
            logger.warning("Cutting-plane LP failed", status=result.status, message=result.message)
            return None
        return result.x[:-1], float(result.x[-1])

    def refresh_lower_bound(self, dim: int, best: np.ndarray) -> None:
        """Global LP over the box: a lower bound on the grid optimum while the box holds it."""
        while np.max(np.abs(best), initial=0.0) > 0.5 * self.box:
            self.box *= 10.0
            self.lower_bound = 0.0
            logger.warning("Enlarged lower-bound box", box=self.box)
        solution = self.solve_lp(np.full(dim, -self.box), np.full(dim, self.box))
        if solution is not None:
            self.lower_bound = max(self.lower_bound, solution[1])


def _polyak(model: _GridModel, alpha: np.ndarray, best_value: float, iterations: int,
            target: Optional[float]) -> tuple[np.ndarray, float, int]:
    """Subgradient descent with Polyak steps; target None means best × 0.999."""
    best = alpha.copy()
    current = alpha.copy()
    for step in range(1, iterations + 1):
        T, gains = model.gains(current)
        value = float(np.max(gains))
        if value < best_value:
            best, best_value = current.copy(), value
        goal = 0.999 * best_value if target is None else target
        gradient = _subgradient(model, T, gains)
        norm_sq = float(gradient @ gradient)
        if norm_sq == 0.0 or value <= goal:
            break
        current = current - (value - goal) / norm_sq * gradient
    return best, best_value, step


def _minimize_on_grid(model: _GridModel, alpha: np.ndarray, options: SynthesisOptions,
                      solver: Optional[_CuttingPlaneSolver]) -> tuple[np.ndarray, float, int]:
    T, gains = model.gains(alpha)
    best, best_value = alpha.copy(), float(np.max(gains))
    if options.inner_solver is InnerSolver.POLYAK:
        return _polyak(model, best, best_value, options.polyak_max_iter, None)

    dim = alpha.size
    radius = max(1.0, float(np.max(np.abs(alpha))))
    iterations = 0
    for iterations in range(1, options.max_inner + 1):
        solver.add_cuts(T, gains)
        if iterations % LOWER_BOUND_EVERY == 1:
            solver.refresh_lower_bound(dim, best)
        gap = best_value - solver.lower_bound
        if gap <= 0.25 * options.gap_rel * best_value or best_value <= 1e-14:
            break
        solution = solver.solve_lp(np.maximum(best - radius, -solver.box),
                                   np.minimum(best + radius, solver.box))
        if solution is None:
            radius *= 0.5
            continue
        candidate, model_value = solution
        predicted = best_value - model_value
        if predicted <= 1e-13 * max(best_value, 1e-300):
            # the model is exact at `best`, so no descent exists anywhere
            break
        T, gains = model.gains(candidate)
        value = float(np.max(gains))
        if value < best_value:
            if best_value - value >= 0.5 * predicted:
                radius = min(2.0 * radius, solver.box)
            best, best_value = candidate, value
        else:
            radius *= 0.5
        if radius < 1e-12 * max(1.0, float(np.max(np.abs(best)))):
            break
        logger.debug("cutting plane step", iteration=iterations, value=value,
                     best=best_value, lower=solver.lower_bound, radius=radius)

    target = max(solver.lower_bound, 0.0)
    polished, polished_value, _ = _polyak(model, best, best_value, POLISH_ITERATIONS, target)
    return polished, polished_value, iterations


def fir_hinf_synthesis(plant: GeneralizedPlant, order: int,
                       options: Optional[SynthesisOptions] = None) -> tuple[FirFilter, DesignReport]:
    """Design the order-`order` FIR filter minimizing ‖G11 + G12·K·G21‖∞."""
    if order < 0:
        raise ValidationError(f"FIR order must be >= 0, got {order}")
    options = options or SynthesisOptions()
    dim = (order + 1) * plant.n_u * plant.n_y
    model = _GridModel(plant, order, frequency_grid(options.grid_points, plant.poles()))
    solver = _CuttingPlaneSolver(model, options.box)

    if options.initial is not None:
        if options.initial.taps.shape != (order + 1, plant.n_u, plant.n_y):
            raise ValidationError("initial filter does not match the requested order and slot")
        alpha = options.initial.as_vector()
    else:
        alpha = np.zeros(dim)

    _, gains0 = model.gains(np.zeros(dim))
    scale = max(float(np.max(gains0)), 1e-300)
    logger.info("Starting FIR synthesis", plant=plant.name, order=order, taps=dim,
                solver=options.inner_solver.value, open_loop=scale)

    best_certified, best_alpha, best_grid, best_peak = np.inf, alpha, np.inf, 0.0
    if options.initial is not None:
        # the warm start is a candidate too
        seed = hinf_norm(affine_closed_loop(plant, options.initial), tol_rel=options.tol_rel)
        best_certified, best_grid, best_peak = seed.gamma, float(np.max(model.gains(alpha)[1])), seed.peak_omega
    gap_history: list[float] = []
    total_iterations = 0
    converged = False
    outer = 0
    for outer in range(1, options.max_outer + 1):
        alpha, grid_value, iterations = _minimize_on_grid(model, alpha, options, solver)
        total_iterations += iterations
        K = FirFilter.from_vector(alpha, order, plant.n_u, plant.n_y, plant.dt)
        result = hinf_norm(affine_closed_loop(plant, K), tol_rel=options.tol_rel)
        certified = result.gamma
        if certified < best_certified:
            best_certified, best_alpha, best_grid, best_peak = certified, alpha, grid_value, result.peak_omega
        gap_history.append((certified - grid_value) / max(certified, 1e-12 * scale))
        logger.debug("outer iteration", outer=outer, grid_value=grid_value, gap=gap_history[-1],
                     certified=certified, peak_omega=result.peak_omega, grid=model.omegas.size)
        if certified - grid_value <= options.gap_rel * certified + 1e-12 * scale:
            converged = True
            break
        spacing = np.pi / options.grid_points
        model.add(np.clip(result.peak_omega + spacing * np.linspace(-1, 1, 9), 0.0, np.pi))

    K = FirFilter.from_vector(best_alpha, order, plant.n_u, plant.n_y, plant.dt)
    report = DesignReport(
        gamma_achieved=best_grid,
        gamma_certified=best_certified,
        iterations=total_iterations,
        grid_points=int(model.omegas.size),
        converged=converged,
        lower_bound=max(solver.lower_bound, 0.0),
        outer_iterations=outer,
        peak_omega=best_peak,
        solver=options.inner_solver.value,
        gap_history=gap_history,
    )
    if converged:
        logger.info("FIR synthesis converged", plant=plant.name, gamma=best_certified,
                    iterations=total_iterations, outer=outer)
    else:
        logger.warning("FIR synthesis hit the outer iteration cap", plant=plant.name,
                       gamma=best_certified, grid_value=best_grid)
    return K, report

"""Stability and performance bounds for loops closed through a quantizer.

The quantizer is replaced by an additive error d with ‖d‖∞ ≤ Δ/2.  For the
state recursion x⁺ = F x + B d and diagonalizable Schur F = TΛT⁻¹ the
deviation from the free response satisfies

    |x[k] − Fᵏx₀| ≤ r_k = c (1 − γᵏ)/(1 − γ) · ‖B‖ · Δ/2,   c = cond₂(T),

with γ ∈ (r(F), 1).  The ellipsoid {x : |T⁻¹x| ≤ r_∞/‖T‖} is positively
invariant and lies inside the ball of radius r_∞.
"""

import itertools
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
import scipy.linalg
import structlog

from ..analysis.norms import hinf_norm
from ..analysis.timedomain import power_norm, simulate
from ..config import get_settings
from ..errors import NumericalError, ValidationError
from ..models import Signal, StateSpaceModel
from ..systems.sslib import require_schur, spectral_radius

logger = structlog.get_logger()

MAX_EIGENVECTOR_CONDITION = 1e8


@dataclass(frozen=True, eq=False)
class StabilityBound:
    c: float
    gamma: float
    b_norm: float
    delta: float
    eigenvectors: np.ndarray  # unit-norm columns

    def r_k(self, k):
        k = np.asarray(k, dtype=float)
        return self.c * (1.0 - self.gamma ** k) / (1.0 - self.gamma) * self.b_norm * self.delta / 2.0

    @property
    def r_inf(self) -> float:
        return self.c * self.b_norm * self.delta / (2.0 * (1.0 - self.gamma))

    @property
    def ellipsoid_radius(self) -> float:
        """Radius of the invariant set measured in eigen-coordinates T⁻¹x."""
        return self.r_inf / float(np.linalg.norm(self.eigenvectors, 2))


@dataclass
class ViolationReport:
    max_ratio: float       # max over trials and k of |x[k] − Fᵏx₀| / r_k
    violations: int
    trials: int
    steps: int


@dataclass
class InvariantSetReport:
    contained: bool
    worst_ratio: float     # max |T⁻¹x[k]| / ellipsoid radius
    max_state_norm: float
    trials: int
    witness: Optional[np.ndarray] = None


@dataclass
class PowerGainReport:
    gamma: float
    bound: float                       # γ·Δ/2
    estimates: dict[str, float] = field(default_factory=dict)
    window: int = 0
    slack: float = 0.02

    @property
    def holds(self) -> bool:
        return all(v <= self.bound * (1.0 + self.slack) for v in self.estimates.values())


def _input_norm(B: np.ndarray) -> float:
    # ‖Bd‖₂ ≤ ‖B‖₂·√m·‖d‖∞, tight for a single input
    return float(np.linalg.norm(B, 2) * np.sqrt(B.shape[1]))


def stability_bounds(F, B, delta: float, gamma_margin: float = 1e-9) -> StabilityBound:
    F = np.atleast_2d(np.asarray(F, dtype=float))
    B = np.asarray(B, dtype=float).reshape(F.shape[0], -1)
    if not delta > 0:
        raise ValidationError(f"quantization step must be positive, got {delta}")
    radius = spectral_radius(F)
    gamma = radius + gamma_margin
    if not gamma < 1.0:
        raise ValidationError(f"r(F) + margin = {gamma:.6g} must stay below 1")
    try:
        _, T = scipy.linalg.eig(F)
    except np.linalg.LinAlgError as exc:
        raise NumericalError(f"eigendecomposition failed: {exc}") from exc
    T = T / np.linalg.norm(T, axis=0, keepdims=True)
    c = float(np.linalg.cond(T))
    if not np.isfinite(c) or c > MAX_EIGENVECTOR_CONDITION:
        raise NumericalError(
            f"F is defective or nearly so (eigenvector condition {c:.3g}); "
            "no Schur-form fallback is available for the bound constant"
        )
    bound = StabilityBound(c, gamma, _input_norm(B), delta, T)
    logger.debug("Stability bound", c=c, gamma=gamma, r_inf=bound.r_inf)
    return bound


def _adversarial_error(F: np.ndarray, B: np.ndarray, e: np.ndarray, half: float,
                       rng: np.random.Generator) -> np.ndarray:
    """Greedy d maximizing |F e + B d| one step ahead; ties broken at random."""
    direction = e @ F.T @ B
    coin = rng.choice((-1.0, 1.0), size=direction.shape)
    return half * np.where(direction > 0, 1.0, np.where(direction < 0, -1.0, coin))


def bound_violation_search(bound: StabilityBound, F, B, steps: int = 10_000, trials: int = 16,
                           rng: Optional[np.random.Generator] = None) -> ViolationReport:
    """Monte-Carlo plus greedy-adversarial search for trajectories breaking r_k.

    Half the trials draw d uniformly, the other half choose ±Δ/2 greedily.
    The free response cancels, so x₀ does not enter the deviation.
    """
    rng = rng or np.random.default_rng(get_settings().seed)
    F = np.atleast_2d(np.asarray(F, dtype=float))
    B = np.asarray(B, dtype=float).reshape(F.shape[0], -1)
    half = bound.delta / 2.0
    n, m = B.shape
    e = np.zeros((trials, n))
    adversarial = np.arange(trials) >= trials // 2
    max_ratio, violations = 0.0, 0
    for k in range(1, steps + 1):
        d = rng.uniform(-half, half, size=(trials, m))
        d[adversarial] = _adversarial_error(F, B, e[adversarial], half, rng)
        e = e @ F.T + d @ B.T
        ratio = np.linalg.norm(e, axis=1) / bound.r_k(k)
        max_ratio = max(max_ratio, float(ratio.max()))
        violations += int(np.sum(ratio > 1.0 + 1e-9))
    if violations:
        logger.error("Stability bound violated", violations=violations, max_ratio=max_ratio)
    return ViolationReport(max_ratio, violations, trials, steps)


def invariant_set_check(bound: StabilityBound, F, B, trials: int = 1000, steps: int = 200,
                        rng: Optional[np.random.Generator] = None,
                        exhaustive_depth: int = 12) -> InvariantSetReport:
    """Start on the boundary of {|T⁻¹x| ≤ r_∞/‖T‖} and check trajectories never leave it.

    Single-input systems additionally get every ±Δ/2 sign sequence up to
    `exhaustive_depth` from both boundary points along each eigen-direction.
    """
    rng = rng or np.random.default_rng(get_settings().seed)
    F = np.atleast_2d(np.asarray(F, dtype=float))
    B = np.asarray(B, dtype=float).reshape(F.shape[0], -1)
    n, m = B.shape
    T_inv = np.linalg.inv(bound.eigenvectors)
    radius = bound.ellipsoid_radius
    half = bound.delta / 2.0

    def scaled_to_boundary(x: np.ndarray) -> np.ndarray:
        size = np.linalg.norm(x @ T_inv.T, axis=1, keepdims=True)
        return x / np.where(size > 0, size, 1.0) * radius

    starts = scaled_to_boundary(rng.standard_normal((trials, n)))
    sequences = rng.uniform(-half, half, size=(steps, trials, m))
    sequences[:, trials // 2:] = np.sign(sequences[:, trials // 2:]) * half
    worst, max_norm, witness = 0.0, 0.0, None
    x = starts.copy()
    history = [x.copy()]
    for k in range(steps):
        x = x @ F.T + sequences[k] @ B.T
        history.append(x.copy())
        ratio = np.linalg.norm(x @ T_inv.T, axis=1) / radius
        worst = max(worst, float(ratio.max()))
        max_norm = max(max_norm, float(np.linalg.norm(x, axis=1).max()))
        if witness is None and ratio.max() > 1.0 + 1e-9:
            witness = np.array(history)[:, int(np.argmax(ratio))]

    if m == 1 and exhaustive_depth > 0:
        real_dirs = np.real(bound.eigenvectors.T)
        edge = scaled_to_boundary(np.vstack([real_dirs, -real_dirs, np.eye(n), -np.eye(n)]))
        signs = np.array(list(itertools.product((-half, half), repeat=exhaustive_depth)))
        for start in edge:
            x = np.tile(start, (signs.shape[0], 1))
            for k in range(exhaustive_depth):
                x = x @ F.T + signs[:, k:k + 1] @ B.T
                ratio = np.linalg.norm(x @ T_inv.T, axis=1) / radius
                worst = max(worst, float(ratio.max()))
                max_norm = max(max_norm, float(np.linalg.norm(x, axis=1).max()))

    contained = worst <= 1.0 + 1e-9
    if not contained:
        logger.error("Invariant set left", worst_ratio=worst)
    return InvariantSetReport(contained, worst, max_norm, trials, witness)


def power_gain_check(T_zd: StateSpaceModel, delta: float, window: Optional[int] = None,
                     rng: Optional[np.random.Generator] = None,
                     disturbance: Optional[Signal] = None,
                     slack: float = 0.02) -> PowerGainReport:
    """Check pow(T_zd d) ≤ ‖T_zd‖∞·Δ/2 for random, peak-frequency and supplied disturbances."""
    window = window or get_settings().power_window
    rng = rng or np.random.default_rng(get_settings().seed)
    require_schur(T_zd)
    result = hinf_norm(T_zd)
    gamma = result.gamma
    half = delta / 2.0
    length = 2 * window
    m = T_zd.n_inputs
    report = PowerGainReport(gamma, gamma * half, window=window, slack=slack)

    noise = Signal(rng.uniform(-half, half, size=(length, m)), T_zd.dt)
    report.estimates["uniform"] = power_norm(simulate(T_zd, noise), window).value

    k = np.arange(length)
    if m == 1:
        tone = half * np.cos(result.peak_omega * k)
        report.estimates["peak_tone"] = power_norm(simulate(T_zd, Signal(tone, T_zd.dt)), window).value
    else:
        _, _, Vh = np.linalg.svd(T_zd.evaluate(np.exp(1j * result.peak_omega)))
        v = Vh[0].conj()
        scale = half / max(np.max(np.abs(v)), 1e-300)
        tone = scale * np.real(np.outer(np.exp(1j * result.peak_omega * k), v))
        report.estimates["peak_tone"] = power_norm(simulate(T_zd, Signal(tone, T_zd.dt)), window).value

    if disturbance is not None:
        if np.max(np.abs(disturbance.samples)) > half * (1 + 1e-12):
            raise ValidationError("supplied disturbance exceeds Δ/2")
        report.estimates["supplied"] = power_norm(simulate(T_zd, disturbance), window).value

    logger.info("Power gain check", gamma=gamma, bound=report.bound, **report.estimates)
    return report

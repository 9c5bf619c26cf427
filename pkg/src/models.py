"""Core value types shared by every liftsynth module.

All types are immutable after construction: arrays are copied and marked
read-only, so instances can be handed between threads freely.
"""

from dataclasses import dataclass, field
from enum import Enum
from typing import Optional, Sequence

import numpy as np

from .errors import ValidationError


class Domain(str, Enum):
    CONTINUOUS = "continuous"
    DISCRETE = "discrete"


class Variable(str, Enum):
    S = "s"
    Z = "z"


class JobKind(str, Enum):
    INTERP = "interp"
    DECIM = "decim"
    SRC = "src"
    COMM = "comm"
    DPCM = "dpcm"
    FIR_APPROX = "fir_approx"
    ANALYZE = "analyze"
    SIMULATE = "simulate"


class InnerSolver(str, Enum):
    CUTTING_PLANE = "cutting_plane"  # Kelley cuts + HiGHS LP, Polyak polish
    POLYAK = "polyak"                # plain subgradient with Polyak steps


def _readonly(array: np.ndarray) -> np.ndarray:
    array.setflags(write=False)
    return array


def _as_block(value, rows: int, cols: int, name: str) -> np.ndarray:
    """Coerce `value` to a float (rows, cols) array, accepting flat input of the right size."""
    array = np.array(value, dtype=float)
    if array.ndim == 2 and array.shape == (rows, cols):
        return array
    if array.size == rows * cols and array.ndim < 2:
        return array.reshape(rows, cols)
    if array.size == 0 and rows * cols == 0:
        return np.zeros((rows, cols))
    raise ValidationError(f"{name} has shape {array.shape}, expected ({rows}, {cols})")


@dataclass(frozen=True, eq=False)
class StateSpaceModel:
    """Real state-space realization (A, B, C, D).

    `dt` is None for continuous-time models and the sampling period h
    (seconds) for discrete-time ones.
    """
    A: np.ndarray
    B: np.ndarray
    C: np.ndarray
    D: np.ndarray
    dt: Optional[float] = None

    def __post_init__(self):
        D = np.atleast_2d(np.array(self.D, dtype=float))
        if D.ndim != 2:
            raise ValidationError(f"D must be a matrix, got shape {D.shape}")
        p, m = D.shape
        A = np.array(self.A, dtype=float)
        if A.size == 0:
            A = np.zeros((0, 0))
        A = np.atleast_2d(A)
        if A.ndim != 2 or A.shape[0] != A.shape[1]:
            raise ValidationError(f"A must be square, got shape {A.shape}")
        n = A.shape[0]
        B = _as_block(self.B, n, m, "B")
        C = _as_block(self.C, p, n, "C")
        if self.dt is not None and not self.dt > 0:
            raise ValidationError(f"sampling period must be positive, got {self.dt}")
        for name, value in (("A", A), ("B", B), ("C", C), ("D", D)):
            object.__setattr__(self, name, _readonly(value))

    @classmethod
    def static(cls, gain, dt: Optional[float] = None) -> "StateSpaceModel":
        """Memoryless system y = gain · u."""
        D = np.atleast_2d(np.array(gain, dtype=float))
        p, m = D.shape
        return cls(np.zeros((0, 0)), np.zeros((0, m)), np.zeros((p, 0)), D, dt)

    @classmethod
    def zero(cls, n_outputs: int, n_inputs: int, dt: Optional[float] = None) -> "StateSpaceModel":
        return cls.static(np.zeros((n_outputs, n_inputs)), dt)

    @classmethod
    def identity(cls, width: int, dt: Optional[float] = None) -> "StateSpaceModel":
        return cls.static(np.eye(width), dt)

    @property
    def n_states(self) -> int:
        return self.A.shape[0]

    @property
    def n_inputs(self) -> int:
        return self.D.shape[1]

    @property
    def n_outputs(self) -> int:
        return self.D.shape[0]

    @property
    def domain(self) -> Domain:
        return Domain.CONTINUOUS if self.dt is None else Domain.DISCRETE

    @property
    def is_discrete(self) -> bool:
        return self.dt is not None

    def evaluate(self, point: complex) -> np.ndarray:
        """Transfer matrix D + C (point·I − A)⁻¹ B at a single complex point."""
        if self.n_states == 0:
            return self.D.astype(complex)
        resolvent = np.linalg.solve(point * np.eye(self.n_states) - self.A, self.B.astype(complex))
        return self.D + self.C @ resolvent

    def with_matrices(self, **changes) -> "StateSpaceModel":
        values = {"A": self.A, "B": self.B, "C": self.C, "D": self.D, "dt": self.dt}
        values.update(changes)
        return StateSpaceModel(**values)

    def __repr__(self) -> str:
        tag = "continuous" if self.dt is None else f"discrete(h={self.dt:g})"
        return (f"StateSpaceModel(n={self.n_states}, inputs={self.n_inputs}, "
                f"outputs={self.n_outputs}, {tag})")


@dataclass(frozen=True, eq=False)
class TransferFunction:
    """Rational SISO transfer function, coefficients in descending powers of s or z."""
    num: np.ndarray
    den: np.ndarray
    variable: Variable = Variable.Z
    dt: Optional[float] = None
    allow_improper: bool = False

    def __post_init__(self):
        num = np.atleast_1d(np.array(self.num, dtype=float))
        den = np.atleast_1d(np.array(self.den, dtype=float))
        if num.ndim != 1 or den.ndim != 1 or den.size == 0 or num.size == 0:
            raise ValidationError("numerator and denominator must be non-empty coefficient lists")
        if den[0] == 0.0:
            raise ValidationError("denominator leading coefficient must be nonzero")
        nonzero = np.flatnonzero(num)
        num = num[nonzero[0]:] if nonzero.size else np.zeros(1)
        variable = Variable(self.variable)
        dt = self.dt
        if variable is Variable.S:
            if dt is not None:
                raise ValidationError("continuous transfer functions carry no sampling period")
        elif dt is None:
            dt = 1.0
        if not self.allow_improper and num.size > den.size:
            raise ValidationError(
                f"improper transfer function: numerator degree {num.size - 1} "
                f"exceeds denominator degree {den.size - 1}"
            )
        object.__setattr__(self, "num", _readonly(num))
        object.__setattr__(self, "den", _readonly(den))
        object.__setattr__(self, "variable", variable)
        object.__setattr__(self, "dt", dt)

    @classmethod
    def static(cls, gain: float, variable: Variable = Variable.Z, dt: Optional[float] = None):
        return cls([gain], [1.0], variable, dt)

    @classmethod
    def fir(cls, taps: Sequence[float], dt: Optional[float] = None) -> "TransferFunction":
        """FIR in z⁻¹: taps[0] + taps[1] z⁻¹ + … ."""
        taps = np.atleast_1d(np.array(taps, dtype=float))
        den = np.zeros(taps.size)
        den[0] = 1.0
        return cls(taps, den, Variable.Z, dt)

    @classmethod
    def from_z_inverse(cls, b: Sequence[float], a: Sequence[float], dt: Optional[float] = None):
        """Build from polynomials in z⁻¹ (b0 + b1 z⁻¹ + …)/(a0 + a1 z⁻¹ + …)."""
        b = list(map(float, b))
        a = list(map(float, a))
        width = max(len(a), len(b))
        return cls(b + [0.0] * (width - len(b)), a + [0.0] * (width - len(a)), Variable.Z, dt)

    @property
    def order(self) -> int:
        return self.den.size - 1

    @property
    def is_strictly_proper(self) -> bool:
        return self.num.size < self.den.size or not np.any(self.num)

    def evaluate(self, point: complex) -> complex:
        return np.polyval(self.num, point) / np.polyval(self.den, point)

    def poles(self) -> np.ndarray:
        return np.roots(self.den)

    def is_stable(self, tol: float = 0.0) -> bool:
        poles = self.poles()
        if poles.size == 0:
            return True
        if self.variable is Variable.S:
            return bool(np.max(poles.real) < -tol)
        return bool(np.max(np.abs(poles)) < 1.0 - tol)


@dataclass(frozen=True, eq=False)
class Signal:
    """Uniformly sampled vector sequence, samples shaped (length, width)."""
    samples: np.ndarray
    period: float = 1.0
    original_length: Optional[int] = None  # set by lifting when zero padding was applied

    def __post_init__(self):
        samples = np.array(self.samples, dtype=float)
        if samples.ndim == 1:
            samples = samples.reshape(-1, 1)
        if samples.ndim != 2:
            raise ValidationError(f"signal samples must be 1-D or 2-D, got {samples.ndim}-D")
        if not self.period > 0:
            raise ValidationError(f"signal period must be positive, got {self.period}")
        object.__setattr__(self, "samples", _readonly(samples))

    @property
    def length(self) -> int:
        return self.samples.shape[0]

    @property
    def width(self) -> int:
        return self.samples.shape[1]

    def scalar(self) -> np.ndarray:
        if self.width != 1:
            raise ValidationError(f"expected a scalar signal, got width {self.width}")
        return self.samples[:, 0]

    def energy(self) -> float:
        return float(np.sqrt(np.sum(self.samples ** 2)))


@dataclass(frozen=True, eq=False)
class FirFilter:
    """FIR filter K(z) = Σ_k C_k z⁻ᵏ with p×m taps, stored as an (N+1, p, m) array."""
    taps: np.ndarray
    dt: float = 1.0

    def __post_init__(self):
        taps = np.array(self.taps, dtype=float)
        if taps.ndim == 1:
            taps = taps.reshape(-1, 1, 1)
        if taps.ndim != 3 or taps.shape[0] == 0:
            raise ValidationError(f"FIR taps must be shaped (N+1, p, m), got {taps.shape}")
        if not self.dt > 0:
            raise ValidationError(f"FIR rate period must be positive, got {self.dt}")
        object.__setattr__(self, "taps", _readonly(taps))

    @classmethod
    def zeros(cls, order: int, n_outputs: int, n_inputs: int, dt: float = 1.0) -> "FirFilter":
        return cls(np.zeros((order + 1, n_outputs, n_inputs)), dt)

    @classmethod
    def from_vector(cls, alpha: np.ndarray, order: int, n_outputs: int, n_inputs: int,
                    dt: float = 1.0) -> "FirFilter":
        """Inverse of `as_vector` (ordering: tap, output row, input column)."""
        return cls(np.asarray(alpha, dtype=float).reshape(order + 1, n_outputs, n_inputs), dt)

    @property
    def order(self) -> int:
        return self.taps.shape[0] - 1

    @property
    def n_outputs(self) -> int:
        return self.taps.shape[1]

    @property
    def n_inputs(self) -> int:
        return self.taps.shape[2]

    @property
    def is_siso(self) -> bool:
        return self.taps.shape[1:] == (1, 1)

    @property
    def coefficients(self) -> np.ndarray:
        """Impulse response of a SISO filter."""
        if not self.is_siso:
            raise ValidationError("coefficients are only defined for SISO filters")
        return self.taps[:, 0, 0]

    def as_vector(self) -> np.ndarray:
        return self.taps.reshape(-1).copy()

    def response(self, omegas: np.ndarray) -> np.ndarray:
        """K(e^{jω}) for every ω, shaped (len(omegas), p, m)."""
        omegas = np.atleast_1d(np.asarray(omegas, dtype=float))
        phases = np.exp(-1j * np.outer(omegas, np.arange(self.order + 1)))
        return np.einsum("wk,kpm->wpm", phases, self.taps)

    def to_state_space(self) -> StateSpaceModel:
        """Shift-register realization; taps enter only C and D."""
        order, p, m = self.order, self.n_outputs, self.n_inputs
        n = order * m
        A = np.zeros((n, n))
        if order > 1:
            A[m:, :-m] = np.eye(n - m)
        B = np.zeros((n, m))
        if order > 0:
            B[:m, :] = np.eye(m)
        C = np.hstack(list(self.taps[1:])) if order > 0 else np.zeros((p, 0))
        return StateSpaceModel(A, B, C, self.taps[0], self.dt)

    def shifted(self, steps: int) -> "FirFilter":
        """Multiply by z^{-steps}."""
        pad = np.zeros((steps,) + self.taps.shape[1:])
        return FirFilter(np.concatenate([pad, self.taps]), self.dt)

    def padded(self, order: int) -> "FirFilter":
        """Same filter with zero taps appended up to `order`."""
        if order < self.order:
            raise ValidationError(f"cannot pad an order-{self.order} filter down to {order}")
        pad = np.zeros((order - self.order,) + self.taps.shape[1:])
        return FirFilter(np.concatenate([self.taps, pad]), self.dt)

    def scaled(self, factor: float) -> "FirFilter":
        return FirFilter(self.taps * factor, self.dt)

    def convolve(self, other: "FirFilter") -> "FirFilter":
        """Product self(z)·other(z); other runs first, so self.n_inputs == other.n_outputs."""
        if self.n_inputs != other.n_outputs:
            raise ValidationError(
                f"cannot cascade FIR filters: {other.n_outputs} outputs into {self.n_inputs} inputs"
            )
        out = np.zeros((self.order + other.order + 1, self.n_outputs, other.n_inputs))
        for i, left in enumerate(self.taps):
            for j, right in enumerate(other.taps):
                out[i + j] += left @ right
        return FirFilter(out, other.dt)


@dataclass(frozen=True, eq=False)
class FrequencyResponse:
    """Sampled frequency response over ω ∈ [0, π] (rad/sample)."""
    omegas: np.ndarray
    values: np.ndarray                  # (K, p, m) complex
    flagged: Optional[np.ndarray] = None  # points too close to a pole, values are NaN
    gains: np.ndarray = field(init=False)

    def __post_init__(self):
        omegas = np.array(self.omegas, dtype=float)
        values = np.array(self.values, dtype=complex)
        if omegas.ndim != 1 or values.ndim != 3 or values.shape[0] != omegas.size:
            raise ValidationError("frequency response values must be shaped (len(omegas), p, m)")
        if omegas.size > 1 and np.any(np.diff(omegas) <= 0):
            raise ValidationError("frequency grid must be strictly increasing")
        flagged = (np.zeros(omegas.size, dtype=bool) if self.flagged is None
                   else np.array(self.flagged, dtype=bool))
        gains = np.full(omegas.size, np.nan)
        ok = ~flagged
        if np.any(ok):
            gains[ok] = np.linalg.svd(values[ok], compute_uv=False)[:, 0]
        object.__setattr__(self, "omegas", _readonly(omegas))
        object.__setattr__(self, "values", _readonly(values))
        object.__setattr__(self, "flagged", _readonly(flagged))
        object.__setattr__(self, "gains", _readonly(gains))

    def peak(self) -> tuple[float, float]:
        """(ω, gain) of the largest unflagged gain."""
        index = int(np.nanargmax(self.gains))
        return float(self.omegas[index]), float(self.gains[index])


@dataclass
class DesignReport:
    """Outcome of one FIR synthesis run."""
    gamma_achieved: float                    # best grid value
    gamma_certified: float                   # hinf_norm of the final closed loop
    iterations: int
    grid_points: int
    converged: bool
    lower_bound: float = 0.0
    outer_iterations: int = 0
    peak_omega: float = 0.0
    solver: str = InnerSolver.CUTTING_PLANE.value
    gap_history: list[float] = field(default_factory=list)  # (certified − grid max)/certified per outer pass
    extras: dict[str, float] = field(default_factory=dict)

    @property
    def relative_gap(self) -> float:
        if self.gamma_certified <= 0:
            return 0.0
        return (self.gamma_certified - self.gamma_achieved) / self.gamma_certified

    def summary_lines(self, title: str) -> list[str]:
        lines = [
            f"[{title}]",
            f"gamma_achieved = {self.gamma_achieved:.10g}",
            f"gamma_certified = {self.gamma_certified:.10g}",
            f"lower_bound = {self.lower_bound:.10g}",
            f"peak_omega = {self.peak_omega:.10g}",
            f"iterations = {self.iterations}",
            f"outer_iterations = {self.outer_iterations}",
            f"grid_points = {self.grid_points}",
            f"solver = {self.solver}",
            f"converged = {str(self.converged).lower()}",
        ]
        for key in sorted(self.extras):
            lines.append(f"{key} = {self.extras[key]:.10g}")
        return lines

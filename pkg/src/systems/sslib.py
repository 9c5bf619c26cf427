"""Dense state-space algebra: realizations, interconnections, ZOH discretization, stability tests."""

from typing import Optional, Sequence

import numpy as np
import scipy.linalg
import scipy.signal
import structlog

from ..errors import NumericalError, UnstableSystemError, ValidationError
from ..models import StateSpaceModel, TransferFunction, Variable

logger = structlog.get_logger()


def tf_to_ss(tf: TransferFunction, dt: Optional[float] = None) -> StateSpaceModel:
    """Controllable canonical realization of a proper SISO transfer function.

    Discrete transfer functions use `dt` when given, otherwise their own period.
    """
    if tf.num.size > tf.den.size:
        raise ValidationError(
            f"cannot realize improper transfer function (num degree {tf.num.size - 1}, "
            f"den degree {tf.den.size - 1})"
        )
    period = None if tf.variable is Variable.S else (dt if dt is not None else tf.dt)
    if tf.den.size == 1:
        return StateSpaceModel.static([[tf.num[-1] / tf.den[0]]], period)
    A, B, C, D = scipy.signal.tf2ss(tf.num, tf.den)
    return StateSpaceModel(A, B, C, D, period)


def c2d_zoh(sys: StateSpaceModel, h: float) -> StateSpaceModel:
    """Zero-order-hold discretization via one augmented matrix exponential."""
    if sys.is_discrete:
        raise ValidationError("c2d_zoh expects a continuous-time model")
    if not h > 0:
        raise ValidationError(f"sampling period must be positive, got {h}")
    n, m = sys.n_states, sys.n_inputs
    if n == 0:
        return sys.with_matrices(dt=h)
    augmented = np.zeros((n + m, n + m))
    augmented[:n, :n] = sys.A
    augmented[:n, n:] = sys.B
    phi = scipy.linalg.expm(augmented * h)
    return StateSpaceModel(phi[:n, :n], phi[:n, n:], sys.C, sys.D, h)


def _check_same_domain(*systems: StateSpaceModel) -> None:
    periods = {s.dt for s in systems}
    if len(periods) > 1:
        raise ValidationError(f"domain mismatch between systems: periods {sorted(map(str, periods))}")


def connect_series(g1: StateSpaceModel, g2: StateSpaceModel) -> StateSpaceModel:
    """Cascade: the signal passes through g1 first, then g2 (transfer g2·g1)."""
    _check_same_domain(g1, g2)
    if g1.n_outputs != g2.n_inputs:
        raise ValidationError(f"series: g1 has {g1.n_outputs} outputs, g2 has {g2.n_inputs} inputs")
    n1, n2 = g1.n_states, g2.n_states
    A = np.block([
        [g1.A, np.zeros((n1, n2))],
        [g2.B @ g1.C, g2.A],
    ])
    B = np.vstack([g1.B, g2.B @ g1.D])
    C = np.hstack([g2.D @ g1.C, g2.C])
    D = g2.D @ g1.D
    return StateSpaceModel(A, B, C, D, g1.dt)


def connect_parallel(g1: StateSpaceModel, g2: StateSpaceModel,
                     signs: Sequence[float] = (1.0, 1.0)) -> StateSpaceModel:
    """Shared input, outputs summed with the given signs."""
    _check_same_domain(g1, g2)
    if (g1.n_inputs, g1.n_outputs) != (g2.n_inputs, g2.n_outputs):
        raise ValidationError("parallel: systems must have identical input/output widths")
    s1, s2 = signs
    A = scipy.linalg.block_diag(g1.A, g2.A)
    B = np.vstack([g1.B, g2.B])
    C = np.hstack([s1 * g1.C, s2 * g2.C])
    D = s1 * g1.D + s2 * g2.D
    return StateSpaceModel(A, B, C, D, g1.dt)


def stack_inputs(*systems: StateSpaceModel) -> StateSpaceModel:
    """[G1, G2, …]: separate inputs, outputs summed."""
    _check_same_domain(*systems)
    widths = {s.n_outputs for s in systems}
    if len(widths) != 1:
        raise ValidationError(f"stack_inputs: output widths differ {sorted(widths)}")
    A = scipy.linalg.block_diag(*[s.A for s in systems])
    B = scipy.linalg.block_diag(*[s.B for s in systems])
    C = np.hstack([s.C for s in systems])
    D = np.hstack([s.D for s in systems])
    return StateSpaceModel(A, B, C, D, systems[0].dt)


def stack_outputs(*systems: StateSpaceModel) -> StateSpaceModel:
    """[G1; G2; …]: shared input, outputs stacked."""
    _check_same_domain(*systems)
    widths = {s.n_inputs for s in systems}
    if len(widths) != 1:
        raise ValidationError(f"stack_outputs: input widths differ {sorted(widths)}")
    A = scipy.linalg.block_diag(*[s.A for s in systems])
    B = np.vstack([s.B for s in systems])
    C = scipy.linalg.block_diag(*[s.C for s in systems])
    D = np.vstack([s.D for s in systems])
    return StateSpaceModel(A, B, C, D, systems[0].dt)


def block_diagonal(*systems: StateSpaceModel) -> StateSpaceModel:
    """diag(G1, G2, …): inputs and outputs stacked, no coupling."""
    _check_same_domain(*systems)
    return StateSpaceModel(
        scipy.linalg.block_diag(*[s.A for s in systems]),
        scipy.linalg.block_diag(*[s.B for s in systems]),
        scipy.linalg.block_diag(*[s.C for s in systems]),
        scipy.linalg.block_diag(*[s.D for s in systems]),
        systems[0].dt,
    )


def premultiply(matrix, sys: StateSpaceModel) -> StateSpaceModel:
    """Static gain on the output side: matrix · sys."""
    matrix = np.atleast_2d(np.asarray(matrix, dtype=float))
    if matrix.shape[1] != sys.n_outputs:
        raise ValidationError(f"premultiply: {matrix.shape} gain against {sys.n_outputs} outputs")
    return sys.with_matrices(C=matrix @ sys.C, D=matrix @ sys.D)


def postmultiply(sys: StateSpaceModel, matrix) -> StateSpaceModel:
    """Static gain on the input side: sys · matrix."""
    matrix = np.atleast_2d(np.asarray(matrix, dtype=float))
    if matrix.shape[0] != sys.n_inputs:
        raise ValidationError(f"postmultiply: {matrix.shape} gain against {sys.n_inputs} inputs")
    return sys.with_matrices(B=sys.B @ matrix, D=sys.D @ matrix)


def delay_line(width: int, m: int, dt: float) -> StateSpaceModel:
    """z^{-m} on `width` channels, realized with m·width shift states."""
    if m < 0:
        raise ValidationError(f"delay must be nonnegative, got {m}")
    if m == 0:
        return StateSpaceModel.identity(width, dt)
    n = m * width
    A = np.zeros((n, n))
    A[width:, :-width] = np.eye(n - width)
    B = np.zeros((n, width))
    B[:width, :] = np.eye(width)
    C = np.zeros((width, n))
    C[:, -width:] = np.eye(width)
    return StateSpaceModel(A, B, C, np.zeros((width, width)), dt)


def augment_delay(sys: StateSpaceModel, m: int, side: str = "input") -> StateSpaceModel:
    """Prepend z^{-m} to a discrete system, on its input (default) or output channels."""
    if not sys.is_discrete:
        raise ValidationError("augment_delay needs a discrete-time system")
    if side == "input":
        return connect_series(delay_line(sys.n_inputs, m, sys.dt), sys)
    if side == "output":
        return connect_series(sys, delay_line(sys.n_outputs, m, sys.dt))
    raise ValidationError(f"unknown delay side {side!r}")


def spectral_radius(A) -> float:
    """Largest eigenvalue modulus; raises NumericalError instead of returning garbage."""
    A = np.atleast_2d(np.asarray(A, dtype=float))
    if A.size == 0:
        return 0.0
    if A.shape[0] != A.shape[1]:
        raise ValidationError(f"spectral radius needs a square matrix, got {A.shape}")
    try:
        eigenvalues = scipy.linalg.eigvals(A, check_finite=True)
    except (np.linalg.LinAlgError, ValueError) as exc:
        raise NumericalError(f"eigenvalue computation failed: {exc}") from exc
    if not np.all(np.isfinite(eigenvalues)):
        raise NumericalError("eigenvalue computation returned non-finite values")
    return float(np.max(np.abs(eigenvalues)))


def is_schur(A, tol: float = 0.0) -> bool:
    """Spectral radius strictly below 1 − tol."""
    return spectral_radius(A) < 1.0 - tol


def require_schur(sys: StateSpaceModel, what: str = "system") -> None:
    """Raise UnstableSystemError unless `sys.A` is Schur."""
    radius = spectral_radius(sys.A)
    if radius >= 1.0:
        raise UnstableSystemError(f"{what} is not Schur stable", spectral_radius=radius)


def feedback_inverse_unity(k1: StateSpaceModel) -> StateSpaceModel:
    """Realization of (1 + K1)⁻¹ for a square discrete system K1.

    The inverse is checked for Schur stability; an unstable inverse raises
    UnstableSystemError carrying its spectral radius.
    """
    if not k1.is_discrete:
        raise ValidationError("feedback_inverse_unity needs a discrete-time system")
    if k1.n_inputs != k1.n_outputs:
        raise ValidationError("feedback_inverse_unity needs a square system")
    eye = np.eye(k1.n_inputs)
    feedthrough = eye + k1.D
    if np.linalg.cond(feedthrough) > 1e12:
        raise NumericalError("1 + D is singular, (1 + K1)⁻¹ is not well posed")
    inverse_d = np.linalg.inv(feedthrough)
    A = k1.A - k1.B @ inverse_d @ k1.C
    result = StateSpaceModel(A, k1.B @ inverse_d, -inverse_d @ k1.C, inverse_d, k1.dt)
    radius = spectral_radius(A)
    if radius >= 1.0:
        logger.warning("Unstable unity-feedback inverse", spectral_radius=radius)
        raise UnstableSystemError("(1 + K1)⁻¹ is unstable", spectral_radius=radius)
    return result


def impulse_response(sys: StateSpaceModel, length: int) -> np.ndarray:
    """Markov parameters D, CB, CAB, … shaped (length, p, m)."""
    out = np.zeros((length, sys.n_outputs, sys.n_inputs))
    if length == 0:
        return out
    out[0] = sys.D
    column = sys.B.copy()
    for k in range(1, length):
        out[k] = sys.C @ column
        column = sys.A @ column
    return out

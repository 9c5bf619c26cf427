"""Multirate operators, discrete-time lifting and fast-sample/fast-hold (FSFH) lifted systems."""

from dataclasses import dataclass

import numpy as np
import scipy.linalg
import structlog

from ..errors import ValidationError
from ..models import FirFilter, Signal, StateSpaceModel
from .sslib import c2d_zoh

logger = structlog.get_logger()


@dataclass(frozen=True, eq=False)
class LiftedSystem:
    """[G]_N: a continuous system seen through rate-h/N hold and sample, lifted to period h."""
    inner: StateSpaceModel
    block_factor: int
    input_width: int   # channel widths before lifting
    output_width: int

    def __post_init__(self):
        if self.block_factor < 1:
            raise ValidationError(f"block factor must be >= 1, got {self.block_factor}")
        if (self.inner.n_inputs != self.block_factor * self.input_width
                or self.inner.n_outputs != self.block_factor * self.output_width):
            raise ValidationError("lifted system widths must be N times the pre-lift widths")

    @property
    def period(self) -> float:
        return self.inner.dt


def upsample(x: Signal, factor: int) -> Signal:
    """Insert factor−1 zeros after every sample."""
    if factor < 1:
        raise ValidationError(f"upsampling factor must be >= 1, got {factor}")
    out = np.zeros((x.length * factor, x.width))
    out[::factor] = x.samples
    return Signal(out, x.period / factor)


def downsample(x: Signal, factor: int) -> Signal:
    """Keep samples 0, M, 2M, …"""
    if factor < 1:
        raise ValidationError(f"downsampling factor must be >= 1, got {factor}")
    return Signal(x.samples[::factor], x.period * factor)


def lift_signal(x: Signal, factor: int) -> Signal:
    """Stack blocks of `factor` consecutive samples; short tails are zero padded."""
    if factor < 1:
        raise ValidationError(f"lifting factor must be >= 1, got {factor}")
    blocks = -(-x.length // factor)
    padded = np.zeros((blocks * factor, x.width))
    padded[:x.length] = x.samples
    lifted = padded.reshape(blocks, factor * x.width)
    return Signal(lifted, x.period * factor, original_length=x.length)


def unlift_signal(x: Signal, factor: int) -> Signal:
    if factor < 1 or x.width % factor:
        raise ValidationError(f"signal width {x.width} is not a multiple of {factor}")
    flat = x.samples.reshape(x.length * factor, x.width // factor)
    if x.original_length is not None:
        flat = flat[:x.original_length]
    return Signal(flat, x.period / factor)


def fsfh_lift(sys_c: StateSpaceModel, h: float, factor: int) -> LiftedSystem:
    """Lift a continuous plant under rate-h/N hold and sample.

    With A_d = e^{A h/N} and B_d the matching ZOH input matrix, the lifted
    realization is

        state matrix   A_d^N
        input column j A_d^{N-1-j} B_d
        output row r   C A_d^r
        feedthrough    D on the block diagonal, C A_d^{r-c-1} B_d below it.
    """
    if sys_c.is_discrete:
        raise ValidationError("fsfh_lift expects a continuous-time model")
    if factor < 1:
        raise ValidationError(f"fast factor must be >= 1, got {factor}")
    fast = c2d_zoh(sys_c, h / factor)
    A_d, B_d, C, D = fast.A, fast.B, fast.C, fast.D
    n, m, p = fast.n_states, fast.n_inputs, fast.n_outputs

    powers = [np.eye(n)]
    for _ in range(factor):
        powers.append(A_d @ powers[-1])

    B_lift = np.hstack([powers[factor - 1 - j] @ B_d for j in range(factor)]) if n else np.zeros((0, m * factor))
    C_lift = np.vstack([C @ powers[r] for r in range(factor)]) if n else np.zeros((p * factor, 0))
    markov = [D] + [C @ powers[k] @ B_d for k in range(factor - 1)]
    D_lift = np.zeros((p * factor, m * factor))
    for r in range(factor):
        for c in range(r + 1):
            D_lift[r * p:(r + 1) * p, c * m:(c + 1) * m] = markov[r - c]

    inner = StateSpaceModel(powers[factor], B_lift, C_lift, D_lift, h)
    logger.debug("FSFH lift built", states=n, fast_factor=factor, period=h)
    return LiftedSystem(inner, factor, m, p)


def selection_matrices(m1: int, m2: int, factor: int) -> tuple[np.ndarray, np.ndarray]:
    """Sampler/hold selection matrices for N = k·M1·M2.

    S (M1×N) picks the first fast sample of every slow-rate-h/M1 slot;
    H (N×M2) repeats every rate-h/M2 hold value over its k·M1 fast slots.
    """
    if min(m1, m2, factor) < 1 or factor % (m1 * m2):
        raise ValidationError(f"N={factor} must be a positive multiple of M1·M2={m1 * m2}")
    k = factor // (m1 * m2)
    p = np.zeros((1, k * m2))
    p[0, 0] = 1.0
    q = np.ones((k * m1, 1))
    S = scipy.linalg.block_diag(*([p] * m1))
    H = scipy.linalg.block_diag(*([q] * m2))
    return S, H


def polyphase_reconstruct_interp(k_lifted: FirFilter, factor: int) -> FirFilter:
    """K(z) = Σ_i z^{-i} K̃_i(z^L) for a 1-input/L-output lifted filter."""
    if k_lifted.n_inputs != 1 or k_lifted.n_outputs != factor:
        raise ValidationError(f"interpolator filter must be 1-input/{factor}-output")
    # fast tap k·L + i is row i of lifted tap k
    fast = k_lifted.taps[:, :, 0].reshape(-1)
    return FirFilter(fast, k_lifted.dt / factor)


def polyphase_reconstruct_decim(h_lifted: FirFilter, factor: int) -> FirFilter:
    """Causal H(z) = z^{-M} H̃(z^M) [1, z, …, z^{M-1}]ᵀ for an M-input/1-output lifted filter."""
    if h_lifted.n_outputs != 1 or h_lifted.n_inputs != factor:
        raise ValidationError(f"decimator filter must be {factor}-input/1-output")
    order = h_lifted.order
    fast = np.zeros(factor * (order + 1) + 1)
    for k in range(order + 1):
        for i in range(factor):
            fast[factor * (k + 1) - i] = h_lifted.taps[k, 0, i]
    return FirFilter(fast, h_lifted.dt / factor)


def polyphase_decompose_interp(k_fast: FirFilter, factor: int) -> FirFilter:
    """Inverse of polyphase_reconstruct_interp; the fast filter is zero padded to a multiple of L."""
    coeffs = k_fast.coefficients
    blocks = -(-coeffs.size // factor)
    padded = np.zeros(blocks * factor)
    padded[:coeffs.size] = coeffs
    return FirFilter(padded.reshape(blocks, factor, 1), k_fast.dt * factor)


def polyphase_decompose_decim(h_fast: FirFilter, factor: int) -> FirFilter:
    """Inverse of polyphase_reconstruct_decim; tap 0 of the fast filter must be zero."""
    coeffs = h_fast.coefficients
    if coeffs[0] != 0.0:
        raise ValidationError("causal decimator reconstruction has no z^0 tap; shift the filter by one sample")
    blocks = max(1, -(-(coeffs.size - 1) // factor))
    padded = np.zeros(blocks * factor + 1)
    padded[:coeffs.size] = coeffs
    taps = np.zeros((blocks, 1, factor))
    for k in range(blocks):
        for i in range(factor):
            taps[k, 0, i] = padded[factor * (k + 1) - i]
    return FirFilter(taps, h_fast.dt * factor)

"""Time-domain simulation and power-norm estimation."""

from dataclasses import dataclass
from typing import Optional

import numpy as np
import scipy.signal
import structlog

from ..errors import ValidationError
from ..models import FirFilter, Signal, StateSpaceModel

logger = structlog.get_logger()


@dataclass(frozen=True)
class PowerEstimate:
    value: float
    window: int  # samples actually averaged

    def __float__(self) -> float:
        return self.value


def simulate(sys: StateSpaceModel, u: Signal, x0: Optional[np.ndarray] = None) -> Signal:
    """x[k+1] = A x[k] + B u[k], y[k] = C x[k] + D u[k]."""
    if not sys.is_discrete:
        raise ValidationError("simulate runs discrete-time systems only")
    if u.width != sys.n_inputs:
        raise ValidationError(f"input width {u.width} does not match {sys.n_inputs} system inputs")
    n = sys.n_states
    x = np.zeros(n) if x0 is None else np.array(x0, dtype=float).reshape(n)
    inputs = u.samples
    outputs = np.empty((u.length, sys.n_outputs))
    A, B, C, D = sys.A, sys.B, sys.C, sys.D
    for k in range(u.length):
        outputs[k] = C @ x + D @ inputs[k]
        x = A @ x + B @ inputs[k]
    return Signal(outputs, u.period)


def fir_filter_signal(fir: FirFilter, x: Signal) -> Signal:
    """Apply a SISO FIR filter to a scalar signal."""
    return Signal(scipy.signal.lfilter(fir.coefficients, [1.0], x.scalar()), x.period)


def power_norm(x: Signal, window: int) -> PowerEstimate:
    """Root-mean-square over the last `window` samples (all of them if the signal is shorter)."""
    if window < 1:
        raise ValidationError(f"power window must be >= 1, got {window}")
    used = min(window, x.length)
    if used == 0:
        return PowerEstimate(0.0, 0)
    tail = x.samples[-used:]
    value = float(np.sqrt(np.sum(tail ** 2) / used))
    return PowerEstimate(value, used)

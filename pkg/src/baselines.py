"""Comparison filters for the designed ones."""

import numpy as np
import structlog

from .errors import ValidationError
from .models import FirFilter

logger = structlog.get_logger()

BASELINE_KINDS = ("windowed_sinc",)


def emit_baseline(kind: str, taps: int, cutoff: float, gain: float = 1.0, dt: float = 1.0) -> FirFilter:
    """Hamming-windowed ideal lowpass, linear phase around the center tap.

        h[n] = gain · (ωc/π) · sinc(ωc (n − (taps−1)/2) / π) · w[n]

    with w the Hamming window of length `taps`.  cutoff = π and an odd tap
    count collapse to a delayed unit impulse.
    """
    if kind not in BASELINE_KINDS:
        raise ValidationError(f"unknown baseline kind {kind!r}; expected one of {BASELINE_KINDS}")
    if taps < 1:
        raise ValidationError(f"baseline needs at least one tap, got {taps}")
    if not 0.0 < cutoff <= np.pi:
        raise ValidationError(f"cutoff must lie in (0, π], got {cutoff}")
    n = np.arange(taps) - (taps - 1) / 2.0
    coefficients = gain * (cutoff / np.pi) * np.sinc(cutoff * n / np.pi) * np.hamming(taps)
    logger.debug("Baseline emitted", kind=kind, taps=taps, cutoff=cutoff, gain=gain)
    return FirFilter(coefficients, dt)

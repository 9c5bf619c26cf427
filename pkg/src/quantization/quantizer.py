"""Uniform mid-tread quantizer."""

from dataclasses import dataclass

import numpy as np

from ..errors import ValidationError


@dataclass(frozen=True)
class QuantizerConfig:
    delta: float
    tie_rule: str = "half_away_from_zero"  # the only rule implemented

    def __post_init__(self):
        if not self.delta > 0:
            raise ValidationError(f"quantization step must be positive, got {self.delta}")
        if self.tie_rule != "half_away_from_zero":
            raise ValidationError(f"unsupported tie rule {self.tie_rule!r}")


def quantize(x, cfg: QuantizerConfig):
    """Nearest multiple of Δ, ties rounded away from zero; |x − Q(x)| ≤ Δ/2 componentwise."""
    values = np.asarray(x, dtype=float)
    levels = np.sign(values) * np.floor(np.abs(values) / cfg.delta + 0.5)
    out = levels * cfg.delta
    return float(out) if np.ndim(out) == 0 else out

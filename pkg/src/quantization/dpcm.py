"""Streaming DPCM encoder and decoder.

Encoder: e = r − u, ê = Q(e), u = K1·ê (K1 sees past ê only).
Decoder: r̂ = K2·(ê + n).
"""

from dataclasses import dataclass
from typing import Optional, Union

import numpy as np
import structlog

from ..errors import ValidationError
from ..models import FirFilter, Signal, StateSpaceModel
from .quantizer import QuantizerConfig, quantize

logger = structlog.get_logger()

FilterLike = Union[StateSpaceModel, FirFilter]


def _as_siso(system: FilterLike, what: str) -> StateSpaceModel:
    sys = system.to_state_space() if isinstance(system, FirFilter) else system
    if not sys.is_discrete or sys.n_inputs != 1 or sys.n_outputs != 1:
        raise ValidationError(f"{what} must be a discrete SISO system")
    return sys


@dataclass
class EncodedStream:
    codes: Signal       # ê, the transmitted quantized prediction errors
    errors: Signal      # e before quantization
    predictions: Signal  # u


class DpcmEncoder:
    """Stateful per-stream encoder; not shared between threads."""

    def __init__(self, k1: FilterLike, cfg: QuantizerConfig):
        self.k1 = _as_siso(k1, "K1")
        self.cfg = cfg
        self.delayed = bool(np.any(self.k1.D != 0.0))
        if self.delayed:
            logger.warning("K1 has a direct feedthrough; using the one-sample-delay convention")
        self.reset()

    def reset(self) -> None:
        self.x = np.zeros(self.k1.n_states)
        self.u = 0.0

    def step(self, r: float) -> tuple[float, float, float]:
        """One sample: returns (ê, e, u)."""
        A, B, C, D = self.k1.A, self.k1.B, self.k1.C, self.k1.D
        u = self.u if self.delayed else float((C @ self.x)[0])
        e = r - u
        e_hat = quantize(e, self.cfg)
        if self.delayed:
            self.u = float((C @ self.x)[0] + D[0, 0] * e_hat)
        self.x = A @ self.x + B[:, 0] * e_hat
        return e_hat, e, u

    def encode(self, r: Signal) -> EncodedStream:
        codes, errors, predictions = (np.empty(r.length) for _ in range(3))
        for k, value in enumerate(r.scalar()):
            codes[k], errors[k], predictions[k] = self.step(float(value))
        return EncodedStream(Signal(codes, r.period), Signal(errors, r.period),
                             Signal(predictions, r.period))


class DpcmDecoder:
    def __init__(self, k2: FilterLike):
        self.k2 = _as_siso(k2, "K2")
        self.reset()

    def reset(self) -> None:
        self.x = np.zeros(self.k2.n_states)

    def step(self, received: float) -> float:
        A, B, C, D = self.k2.A, self.k2.B, self.k2.C, self.k2.D
        out = float((C @ self.x)[0] + D[0, 0] * received)
        self.x = A @ self.x + B[:, 0] * received
        return out

    def decode(self, codes: Signal, noise: Optional[Signal] = None) -> Signal:
        received = codes.scalar()
        if noise is not None:
            if noise.length != codes.length:
                raise ValidationError("channel noise and code stream lengths differ")
            received = received + noise.scalar()
        out = np.array([self.step(float(v)) for v in received])
        return Signal(out, codes.period)


def dpcm_encode(r: Signal, k1: FilterLike, cfg: QuantizerConfig) -> Signal:
    return DpcmEncoder(k1, cfg).encode(r).codes


def dpcm_decode(codes: Signal, noise: Optional[Signal], k2: FilterLike) -> Signal:
    return DpcmDecoder(k2).decode(codes, noise)

"""Validated design specifications (pydantic models).

Transfer functions are entered as descending-power coefficient lists; the
`*_tf` properties turn them into TransferFunction values.
"""

from typing import Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from ..models import TransferFunction, Variable


class TfSpec(BaseModel):
    """Coefficient lists of a rational transfer function."""
    model_config = ConfigDict(frozen=True)

    num: list[float]
    den: list[float] = Field(default_factory=lambda: [1.0])

    @field_validator("num", "den")
    @classmethod
    def _non_empty(cls, value: list[float]) -> list[float]:
        if not value:
            raise ValueError("coefficient list must not be empty")
        return value

    @model_validator(mode="after")
    def _leading_denominator(self) -> "TfSpec":
        if self.den[0] == 0.0:
            raise ValueError("denominator leading coefficient must be nonzero")
        return self

    def continuous(self) -> TransferFunction:
        return TransferFunction(self.num, self.den, Variable.S)

    def discrete(self, dt: float) -> TransferFunction:
        return TransferFunction(self.num, self.den, Variable.Z, dt)


def _check_continuous(spec: TfSpec, label: str, strictly_proper: bool) -> None:
    try:
        tf = spec.continuous()
    except Exception as exc:
        raise ValueError(f"{label}: {exc}") from exc
    if strictly_proper and not tf.is_strictly_proper:
        raise ValueError(f"{label} must be strictly proper")
    if not tf.is_stable():
        raise ValueError(f"{label} must be stable (poles {np.round(tf.poles(), 6).tolist()})")


def _check_discrete(spec: TfSpec, label: str, dt: float) -> None:
    try:
        tf = spec.discrete(dt)
    except Exception as exc:
        raise ValueError(f"{label}: {exc}") from exc
    if not tf.is_stable():
        raise ValueError(f"{label} must be Schur stable (poles {np.round(tf.poles(), 6).tolist()})")


class _MultirateSpec(BaseModel):
    model_config = ConfigDict(frozen=True)

    F: TfSpec
    P: TfSpec = Field(default_factory=lambda: TfSpec(num=[1.0]))
    factor: int = Field(ge=1)
    delay: int = Field(default=0, ge=0)
    h: float = Field(gt=0)
    fast_factor: int = Field(ge=1, description="FSFH factor N, a multiple of the rate factor")
    fir_order: int = Field(default=8, ge=0)

    @model_validator(mode="after")
    def _consistency(self):
        if self.fast_factor % self.factor:
            raise ValueError(f"fast_factor {self.fast_factor} must be a multiple of factor {self.factor}")
        _check_continuous(self.F, "F", strictly_proper=True)
        _check_continuous(self.P, "P", strictly_proper=False)
        return self

    @property
    def F_tf(self) -> TransferFunction:
        return self.F.continuous()

    @property
    def P_tf(self) -> TransferFunction:
        return self.P.continuous()

    def with_changes(self, **changes):
        return self.model_validate({**self.model_dump(), **changes})


class InterpSpec(_MultirateSpec):
    """Upsample by L = factor, filter with K(z), hold at h/L through P."""


class DecimSpec(_MultirateSpec):
    """Filter with H(z) at h/M, downsample by M = factor, hold at h through P."""


class CommSpec(BaseModel):
    """Transmitter/receiver pair around a discrete channel C(z)."""
    model_config = ConfigDict(frozen=True)

    F: TfSpec
    P: TfSpec = Field(default_factory=lambda: TfSpec(num=[1.0]))
    channel: TfSpec = Field(default_factory=lambda: TfSpec(num=[1.0]))
    noise_weight: TfSpec = Field(default_factory=lambda: TfSpec(num=[1.0]))
    penalty_weight: TfSpec = Field(default_factory=lambda: TfSpec(num=[1.0, -1.0], den=[1.0, 0.5]))
    penalty_gain: float = Field(default=0.0, ge=0)
    compression: int = Field(default=1, ge=1)
    delay: int = Field(default=2, ge=0)
    h: float = Field(default=1.0, gt=0)
    fast_factor: int = Field(default=8, ge=1)
    receiver_order: int = Field(default=8, ge=0)
    transmitter_order: int = Field(default=8, ge=0)
    iterations: int = Field(default=5, ge=1)
    channel_scale: bool = True

    @model_validator(mode="after")
    def _consistency(self):
        if self.fast_factor % self.compression:
            raise ValueError(
                f"fast_factor {self.fast_factor} must be a multiple of compression {self.compression}"
            )
        _check_continuous(self.F, "F", strictly_proper=True)
        _check_continuous(self.P, "P", strictly_proper=False)
        for label, weight in (("channel", self.channel), ("noise_weight", self.noise_weight),
                              ("penalty_weight", self.penalty_weight)):
            _check_discrete(weight, label, self.h)
        return self

    @property
    def scale(self) -> float:
        return float(np.sqrt(self.fast_factor / self.h)) if self.channel_scale else 1.0

    def penalty_tf(self, gain: Optional[float] = None) -> TransferFunction:
        gain = self.penalty_gain if gain is None else gain
        return TransferFunction(np.asarray(self.penalty_weight.num) * gain,
                                self.penalty_weight.den, Variable.Z, self.h)

    def with_changes(self, **changes) -> "CommSpec":
        return self.model_validate({**self.model_dump(), **changes})


class DpcmSpec(BaseModel):
    """DPCM coder: predictor K1 in the encoder loop, decoder K2 after the channel."""
    model_config = ConfigDict(frozen=True)

    W: TfSpec
    quant_weight: float = Field(default=0.5, ge=0, description="W_d, static weight on the quantizer error")
    noise_weight: TfSpec = Field(default_factory=lambda: TfSpec(num=[0.0]))
    delay: int = Field(default=2, ge=0)
    h: float = Field(default=1.0, gt=0)
    fast_factor: int = Field(default=8, ge=1)
    predictor_order: int = Field(default=4, ge=0)
    decoder_order: int = Field(default=8, ge=0)
    channel_scale: bool = True

    @model_validator(mode="after")
    def _consistency(self):
        _check_continuous(self.W, "W", strictly_proper=True)
        _check_discrete(self.noise_weight, "noise_weight", self.h)
        return self

    @property
    def scale(self) -> float:
        return float(np.sqrt(self.fast_factor / self.h)) if self.channel_scale else 1.0

    def with_changes(self, **changes) -> "DpcmSpec":
        return self.model_validate({**self.model_dump(), **changes})


class FirApproxSpec(BaseModel):
    """Approximate a stable discrete IIR filter by `taps` FIR taps under a frequency weight."""
    model_config = ConfigDict(frozen=True)

    target: TfSpec
    weight: TfSpec = Field(default_factory=lambda: TfSpec(num=[1.0]))
    taps: int = Field(default=32, ge=1)
    dt: float = Field(default=1.0, gt=0)

    @model_validator(mode="after")
    def _consistency(self):
        _check_discrete(self.target, "target", self.dt)
        _check_discrete(self.weight, "weight", self.dt)
        return self

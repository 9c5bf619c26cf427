"""Two-stage DPCM coder design.

Stage 1 designs a strictly causal FIR predictor P on

    G11 = [W̃, 0]   G12 = −1   G21 = z^{-1}[W̃, W_d]

so that the prediction error is (1 − P)W̃ w − P W_d d.  The encoder
filter is K1 = P/(1 − P) and S_d = (1 + K1)⁻¹ = 1 − P.  Stage 2 designs
the decoder K2 on

    G11 = [z^{-m}W̃, 0, 0]   G12 = −1   G21 = [S_d W̃, S_d W_d, W_n]

Here W̃ = [1, 0, …, 0]·[W]_N is the sampled signal generator; discrete
channels carry the sqrt(N/h) scale.
"""

from dataclasses import dataclass, field
from typing import Optional

import numpy as np
import structlog

from ..analysis.norms import hinf_norm
from ..analysis.timedomain import power_norm, simulate
from ..config import get_settings
from ..errors import ValidationError
from ..models import DesignReport, FirFilter, Signal, StateSpaceModel, TransferFunction
from ..quantization.dpcm import DpcmDecoder, DpcmEncoder
from ..quantization.quantizer import QuantizerConfig
from ..synthesis.fir import SynthesisOptions, fir_hinf_synthesis
from ..synthesis.plant import GeneralizedPlant
from ..systems.sslib import (
    augment_delay,
    connect_parallel,
    connect_series,
    feedback_inverse_unity,
    postmultiply,
    premultiply,
    require_schur,
    stack_inputs,
    tf_to_ss,
)
from .multirate import lifted_tf
from .specs import DpcmSpec

logger = structlog.get_logger()


@dataclass
class DpcmDesign:
    predictor: FirFilter          # P, tap 0 is zero
    k1: StateSpaceModel           # P/(1 − P)
    sensitivity: StateSpaceModel  # S_d = (1 + K1)⁻¹
    k2: FirFilter
    reports: tuple[DesignReport, DesignReport]

    @property
    def quantization_path(self) -> StateSpaceModel:
        """d → r̂ through S_d and K2, the map the power bound applies to."""
        return connect_series(self.sensitivity, self.k2.to_state_space().with_matrices(dt=self.k1.dt))


@dataclass
class DpcmTrace:
    reference: Signal
    reconstruction: Signal
    errors: Signal
    codes: Signal

    @property
    def quantization_error(self) -> Signal:
        return Signal(self.codes.scalar() - self.errors.scalar(), self.codes.period)


@dataclass
class DpcmComparison:
    designed_pow: float
    delta_mod_pow: float
    window: int
    extras: dict[str, float] = field(default_factory=dict)


def _signal_row(spec: DpcmSpec) -> StateSpaceModel:
    lifted = lifted_tf(spec.W.continuous(), spec.h, spec.fast_factor)
    row = np.zeros((1, spec.fast_factor))
    row[0, 0] = 1.0
    return premultiply(row, lifted)


def predictor_to_k1(predictor: FirFilter) -> StateSpaceModel:
    """K1 = (1 − P)⁻¹ − 1; raises UnstableSystemError when 1 − P has zeros outside the disc."""
    if predictor.taps[0, 0, 0] != 0.0:
        raise ValidationError("the predictor must be strictly causal")
    p_ss = predictor.to_state_space()
    inverse = feedback_inverse_unity(premultiply([[-1.0]], p_ss))
    return connect_parallel(inverse, StateSpaceModel.identity(1, p_ss.dt), signs=(1.0, -1.0))


def identity_decoder(k1: StateSpaceModel) -> StateSpaceModel:
    """K2 = 1 + K1, the decoder that rebuilds the encoder's local reconstruction."""
    return connect_parallel(StateSpaceModel.identity(1, k1.dt), k1)


def delta_modulation_k1(dt: float = 1.0) -> StateSpaceModel:
    """K1 = 1/(z − 1): the accumulator of a Δ-modulator."""
    return tf_to_ss(TransferFunction([1.0], [1.0, -1.0], dt=dt))


def build_predictor_plant(spec: DpcmSpec) -> GeneralizedPlant:
    s, h = spec.scale, spec.h
    signal = _signal_row(spec)
    zero = StateSpaceModel.zero(1, 1, h)
    observed = stack_inputs(signal, StateSpaceModel.static([[spec.quant_weight / s]], h))
    return GeneralizedPlant(
        g11=premultiply([[s]], stack_inputs(signal, zero)),
        g12=StateSpaceModel.static([[-s]], h),
        g21=augment_delay(observed, 1, side="output"),
        name="dpcm_predictor",
    )


def build_decoder_plant(spec: DpcmSpec, k1: StateSpaceModel) -> tuple[GeneralizedPlant, StateSpaceModel]:
    """G2 for a fixed encoder filter; returns (G2, S_d)."""
    require_schur(k1, "encoder filter K1")
    s_d = feedback_inverse_unity(k1)
    s, h = spec.scale, spec.h
    signal = _signal_row(spec)
    zero = StateSpaceModel.zero(1, 1, h)
    reference = augment_delay(signal, spec.delay, side="output")
    noise = postmultiply(tf_to_ss(spec.noise_weight.discrete(h)), [[1.0 / s]])
    plant = GeneralizedPlant(
        g11=premultiply([[s]], stack_inputs(reference, zero, zero)),
        g12=StateSpaceModel.static([[-s]], h),
        g21=stack_inputs(connect_series(signal, s_d),
                         postmultiply(s_d, [[spec.quant_weight / s]]),
                         noise),
        name="dpcm_decoder",
    )
    return plant, s_d


def build_dpcm_plants(spec: DpcmSpec,
                      k1: Optional[StateSpaceModel] = None) -> tuple[GeneralizedPlant, Optional[GeneralizedPlant]]:
    """(G1, G2); G2 needs a fixed K1 and is None without one."""
    g1 = build_predictor_plant(spec)
    g2 = build_decoder_plant(spec, k1)[0] if k1 is not None else None
    return g1, g2


def design_dpcm_full(spec: DpcmSpec, options: Optional[SynthesisOptions] = None) -> DpcmDesign:
    g1 = build_predictor_plant(spec)
    shifted, report1 = fir_hinf_synthesis(g1, spec.predictor_order, options)
    predictor = shifted.shifted(1)
    k1 = predictor_to_k1(predictor)
    logger.info("Predictor designed", order=predictor.order, gamma=report1.gamma_certified)

    g2, s_d = build_decoder_plant(spec, k1)
    k2, report2 = fir_hinf_synthesis(g2, spec.decoder_order, options)
    logger.info("Decoder designed", order=spec.decoder_order, gamma=report2.gamma_certified)
    return DpcmDesign(predictor, k1, s_d, k2, (report1, report2))


def design_dpcm(spec: DpcmSpec, options: Optional[SynthesisOptions] = None
                ) -> tuple[StateSpaceModel, FirFilter, tuple[DesignReport, DesignReport]]:
    design = design_dpcm_full(spec, options)
    return design.k1, design.k2, design.reports


def reference_signals(length: int, h: float = 1.0, noise_amplitude: float = 0.1) -> tuple[Signal, Signal]:
    """r = sin(πt/10) and channel noise n = a·sin(2t) sampled at t = k·h."""
    t = np.arange(length) * h
    return Signal(np.sin(np.pi * t / 10.0), h), Signal(noise_amplitude * np.sin(2.0 * t), h)


def simulate_dpcm(k1: StateSpaceModel, k2, cfg: QuantizerConfig, reference: Signal,
                  noise: Optional[Signal] = None) -> DpcmTrace:
    stream = DpcmEncoder(k1, cfg).encode(reference)
    reconstruction = DpcmDecoder(k2).decode(stream.codes, noise)
    return DpcmTrace(reference, reconstruction, stream.errors, stream.codes)


def reconstruction_error(trace: DpcmTrace, delay: int) -> Signal:
    """r̂[k] − r[k − delay], with r taken as zero before the start."""
    r = trace.reference.scalar()
    delayed = np.concatenate([np.zeros(delay), r[:r.size - delay]]) if delay else r
    return Signal(trace.reconstruction.scalar() - delayed, trace.reference.period)


def dpcm_comparison(design: DpcmDesign, spec: DpcmSpec, delta: float = 0.125,
                    leak: float = 0.95, window: Optional[int] = None) -> DpcmComparison:
    """pow of the reconstruction error: designed coder against Δ-modulation with a leaky decoder."""
    window = window or get_settings().power_window
    cfg = QuantizerConfig(delta)
    reference, noise = reference_signals(2 * window, spec.h)

    designed = simulate_dpcm(design.k1, design.k2, cfg, reference, noise)
    designed_pow = power_norm(reconstruction_error(designed, spec.delay), window).value

    leaky = tf_to_ss(TransferFunction([1.0, 0.0], [1.0, -leak], dt=spec.h))
    baseline = simulate_dpcm(delta_modulation_k1(spec.h), leaky, cfg, reference, noise)
    baseline_pow = power_norm(reconstruction_error(baseline, 0), window).value

    bound = hinf_norm(design.quantization_path).gamma * delta / 2.0
    quant_pow = power_norm(simulate(design.quantization_path, designed.quantization_error), window).value
    logger.info("DPCM comparison", designed=designed_pow, delta_mod=baseline_pow,
                quantization_pow=quant_pow, bound=bound)
    return DpcmComparison(designed_pow, baseline_pow, window, {
        "quantization_pow": quant_pow,
        "quantization_bound": bound,
    })

"""Interpolator, decimator and sampling-rate-converter design through FSFH lifting.

Interpolator (upsample by L, filter K, hold at h/L, then P):
    G11 = z^{-m}[F]_N     G12 = −[P]_N H     G21 = S[F]_N
with S = [1, 0, …, 0] and H the L-block hold matrix; K̃ is 1-input/L-output.

Decimator (filter H at h/M, downsample by M, hold at h, then P):
    G11 = z^{-m}[F]_N     G12 = −[P]_N 1_N   G21 = S[F]_N
with S the M-row sampler; H̃ is M-input/1-output.
"""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
import structlog

from ..analysis.norms import HinfResult, hinf_norm
from ..analysis.timedomain import fir_filter_signal
from ..baselines import emit_baseline
from ..config import get_settings
from ..errors import ValidationError
from ..models import DesignReport, FirFilter, Signal, StateSpaceModel, TransferFunction
from ..synthesis.fir import SynthesisOptions, fir_hinf_synthesis
from ..synthesis.plant import GeneralizedPlant, affine_closed_loop
from ..systems.lifting import (
    downsample,
    fsfh_lift,
    polyphase_decompose_decim,
    polyphase_decompose_interp,
    polyphase_reconstruct_decim,
    polyphase_reconstruct_interp,
    selection_matrices,
    upsample,
)
from ..systems.sslib import augment_delay, postmultiply, premultiply, tf_to_ss
from .specs import DecimSpec, InterpSpec

logger = structlog.get_logger()


@dataclass
class MultirateDesign:
    """A designed fast-rate filter together with its lifted form and the plant it was designed on."""
    filter: FirFilter
    lifted: FirFilter
    report: DesignReport
    plant: GeneralizedPlant


@dataclass
class SrcDesign:
    composite: FirFilter
    interpolator: MultirateDesign
    decimator: MultirateDesign

    @property
    def reports(self) -> dict[str, DesignReport]:
        return {"interp": self.interpolator.report, "decim": self.decimator.report}


@dataclass
class SrcResponse:
    output: Signal
    overshoot: float
    level: float


@dataclass
class OvershootComparison:
    designed: SrcResponse
    baseline: SrcResponse
    extras: dict[str, float] = field(default_factory=dict)


def lifted_tf(tf: TransferFunction, h: float, factor: int) -> StateSpaceModel:
    """[G]_N of a continuous transfer function."""
    return fsfh_lift(tf_to_ss(tf), h, factor).inner


def build_interpolator_plant(spec: InterpSpec) -> GeneralizedPlant:
    N, L = spec.fast_factor, spec.factor
    F_N = lifted_tf(spec.F_tf, spec.h, N)
    P_N = lifted_tf(spec.P_tf, spec.h, N)
    S, H = selection_matrices(1, L, N)
    plant = GeneralizedPlant(
        g11=augment_delay(F_N, spec.delay, side="output"),
        g12=postmultiply(P_N, -H),
        g21=premultiply(S, F_N),
        name="interpolator",
    )
    logger.debug("Interpolator plant built", L=L, N=N, delay=spec.delay,
                 states=plant.g11.n_states + plant.g12.n_states + plant.g21.n_states)
    return plant


def build_decimator_plant(spec: DecimSpec) -> GeneralizedPlant:
    N, M = spec.fast_factor, spec.factor
    F_N = lifted_tf(spec.F_tf, spec.h, N)
    P_N = lifted_tf(spec.P_tf, spec.h, N)
    S, _ = selection_matrices(M, 1, N)
    plant = GeneralizedPlant(
        g11=augment_delay(F_N, spec.delay, side="output"),
        g12=postmultiply(P_N, -np.ones((N, 1))),
        g21=premultiply(S, F_N),
        name="decimator",
    )
    logger.debug("Decimator plant built", M=M, N=N, delay=spec.delay)
    return plant


def interpolator_baseline(spec: InterpSpec) -> FirFilter:
    """Windowed sinc with the designed filter's fast tap count L(q+1), cutoff π/L, gain L."""
    L = spec.factor
    return emit_baseline("windowed_sinc", L * (spec.fir_order + 1), np.pi / L, gain=float(L),
                         dt=spec.h / L)


def decimator_baseline(spec: DecimSpec) -> FirFilter:
    """Windowed sinc with M(q+1) taps and cutoff π/M, delayed one fast sample."""
    M = spec.factor
    taps = emit_baseline("windowed_sinc", M * (spec.fir_order + 1), np.pi / M, dt=spec.h / M)
    return taps.shifted(1)


def interpolator_error_norm(spec: InterpSpec, k_fast: FirFilter,
                            plant: Optional[GeneralizedPlant] = None) -> HinfResult:
    """Certified error-system norm of any fast-rate interpolation filter."""
    plant = plant or build_interpolator_plant(spec)
    k_lifted = polyphase_decompose_interp(k_fast, spec.factor)
    return hinf_norm(affine_closed_loop(plant, k_lifted))


def decimator_error_norm(spec: DecimSpec, h_fast: FirFilter,
                         plant: Optional[GeneralizedPlant] = None) -> HinfResult:
    plant = plant or build_decimator_plant(spec)
    h_lifted = polyphase_decompose_decim(h_fast, spec.factor)
    return hinf_norm(affine_closed_loop(plant, h_lifted))


def _annotate(report: DesignReport, plant: GeneralizedPlant, baseline: HinfResult) -> None:
    report.extras["gamma_zero_filter"] = hinf_norm(plant.g11).gamma
    report.extras["gamma_baseline"] = baseline.gamma


def design_interpolator_full(spec: InterpSpec, options: Optional[SynthesisOptions] = None,
                             compare: bool = True) -> MultirateDesign:
    plant = build_interpolator_plant(spec)
    k_lifted, report = fir_hinf_synthesis(plant, spec.fir_order, options)
    k_fast = polyphase_reconstruct_interp(k_lifted, spec.factor)
    if compare:
        _annotate(report, plant, interpolator_error_norm(spec, interpolator_baseline(spec), plant))
    logger.info("Interpolator designed", L=spec.factor, N=spec.fast_factor, order=spec.fir_order,
                gamma=report.gamma_certified)
    return MultirateDesign(k_fast, k_lifted, report, plant)


def design_interpolator(spec: InterpSpec,
                        options: Optional[SynthesisOptions] = None) -> tuple[FirFilter, DesignReport]:
    design = design_interpolator_full(spec, options)
    return design.filter, design.report


def design_decimator_full(spec: DecimSpec, options: Optional[SynthesisOptions] = None,
                          compare: bool = True) -> MultirateDesign:
    plant = build_decimator_plant(spec)
    h_lifted, report = fir_hinf_synthesis(plant, spec.fir_order, options)
    h_fast = polyphase_reconstruct_decim(h_lifted, spec.factor)
    if compare:
        _annotate(report, plant, decimator_error_norm(spec, decimator_baseline(spec), plant))
    logger.info("Decimator designed", M=spec.factor, N=spec.fast_factor, order=spec.fir_order,
                gamma=report.gamma_certified)
    return MultirateDesign(h_fast, h_lifted, report, plant)


def design_decimator(spec: DecimSpec,
                     options: Optional[SynthesisOptions] = None) -> tuple[FirFilter, DesignReport]:
    design = design_decimator_full(spec, options)
    return design.filter, design.report


def design_src_full(spec_i: InterpSpec, spec_d: DecimSpec,
                    options: Optional[SynthesisOptions] = None) -> SrcDesign:
    """Design K (up by L) and H (down by M) independently, then L(z) = H(z)K(z)."""
    fast_i = spec_i.h / spec_i.factor
    fast_d = spec_d.h / spec_d.factor
    if not np.isclose(fast_i, fast_d, rtol=1e-12, atol=0.0):
        raise ValidationError(
            f"interpolator output period {fast_i:.12g} differs from decimator input period {fast_d:.12g}"
        )
    workers = min(2, get_settings().threads)
    with ThreadPoolExecutor(max_workers=workers) as pool:
        interp_job = pool.submit(design_interpolator_full, spec_i, options)
        decim_job = pool.submit(design_decimator_full, spec_d, options)
        interp, decim = interp_job.result(), decim_job.result()
    composite = decim.filter.convolve(interp.filter)
    logger.info("Rate converter designed", up=spec_i.factor, down=spec_d.factor,
                taps=composite.order + 1)
    return SrcDesign(composite, interp, decim)


def design_src(spec_i: InterpSpec, spec_d: DecimSpec,
               options: Optional[SynthesisOptions] = None) -> tuple[FirFilter, dict[str, DesignReport]]:
    design = design_src_full(spec_i, spec_d, options)
    return design.composite, design.reports


def rectangular_wave(half_period: int, periods: int) -> np.ndarray:
    return np.tile(np.r_[np.ones(half_period), np.zeros(half_period)], periods)


def rectangular_wave_response(composite: FirFilter, up: int, down: int,
                              half_period: int = 20, periods: int = 4) -> SrcResponse:
    """Run a unit rectangular wave through ↑up, the composite filter and ↓down.

    Overshoot is measured against the steady level sum(taps)/up.
    """
    x = Signal(rectangular_wave(half_period, periods), composite.dt * up)
    y = downsample(fir_filter_signal(composite, upsample(x, up)), down)
    level = float(np.sum(composite.coefficients)) / up
    if level == 0.0:
        raise ValidationError("composite filter has zero DC gain")
    overshoot = (float(np.max(y.scalar())) - level) / abs(level)
    return SrcResponse(y, overshoot, level)


def src_overshoot_comparison(design: SrcDesign, spec_i: InterpSpec, spec_d: DecimSpec,
                             half_period: int = 20, periods: int = 4) -> OvershootComparison:
    """Designed composite against a windowed sinc of equal length, cutoff π/max(L, M), gain L."""
    up, down = spec_i.factor, spec_d.factor
    baseline = emit_baseline("windowed_sinc", design.composite.order + 1, np.pi / max(up, down),
                             gain=float(up), dt=design.composite.dt)
    designed = rectangular_wave_response(design.composite, up, down, half_period, periods)
    reference = rectangular_wave_response(baseline, up, down, half_period, periods)
    logger.info("Rectangular-wave overshoot", designed=designed.overshoot, baseline=reference.overshoot)
    return OvershootComparison(designed, reference, {
        "overshoot_designed": designed.overshoot,
        "overshoot_baseline": reference.overshoot,
    })

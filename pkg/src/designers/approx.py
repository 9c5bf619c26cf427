"""Frequency-weighted H-infinity approximation of an IIR filter by an FIR filter.

Error system (K − K_f)·W as a one-block plant: G11 = K·W, G12 = −1, G21 = W.
"""

from dataclasses import dataclass
from typing import Mapping, Optional

import pandas as pd
import structlog

from ..analysis.norms import h2_norm, hinf_norm
from ..models import DesignReport, FirFilter, StateSpaceModel
from ..synthesis.brl import BrlLmi, brl_lmi_assemble
from ..synthesis.fir import SynthesisOptions, fir_hinf_synthesis
from ..synthesis.plant import GeneralizedPlant, affine_realization
from ..systems.sslib import connect_parallel, connect_series, tf_to_ss
from .specs import FirApproxSpec, TfSpec

logger = structlog.get_logger()


@dataclass
class FirApproxResult:
    filter: FirFilter
    report: DesignReport
    hinf_error: float           # ‖K − K_f‖∞
    h2_error: float             # ‖K − K_f‖₂
    weighted_hinf_error: float  # ‖(K − K_f)W‖∞


def build_fir_approx_plant(spec: FirApproxSpec) -> GeneralizedPlant:
    target = tf_to_ss(spec.target.discrete(spec.dt))
    weight = tf_to_ss(spec.weight.discrete(spec.dt))
    return GeneralizedPlant(
        g11=connect_series(weight, target),
        g12=StateSpaceModel.static([[-1.0]], spec.dt),
        g21=weight,
        name="fir_approx",
    )


def approximation_error(spec: FirApproxSpec, fir: FirFilter) -> StateSpaceModel:
    """Unweighted K − K_f."""
    target = tf_to_ss(spec.target.discrete(spec.dt))
    return connect_parallel(target, fir.to_state_space().with_matrices(dt=spec.dt), signs=(1.0, -1.0))


def fir_error_lmi(spec: FirApproxSpec, gamma: float) -> BrlLmi:
    """Bounded-real LMI of the weighted error, affine in the FIR taps."""
    return brl_lmi_assemble(affine_realization(build_fir_approx_plant(spec), spec.taps - 1), gamma)


def design_fir_approximation(spec: FirApproxSpec,
                             options: Optional[SynthesisOptions] = None) -> FirApproxResult:
    plant = build_fir_approx_plant(spec)
    fir, report = fir_hinf_synthesis(plant, spec.taps - 1, options)
    error = approximation_error(spec, fir)
    result = FirApproxResult(
        filter=fir,
        report=report,
        hinf_error=hinf_norm(error).gamma,
        h2_error=h2_norm(error),
        weighted_hinf_error=report.gamma_certified,
    )
    report.extras.update(hinf_error=result.hinf_error, h2_error=result.h2_error)
    logger.info("FIR approximation designed", taps=spec.taps, hinf_error=result.hinf_error,
                h2_error=result.h2_error, weighted=result.weighted_hinf_error)
    return result


def weight_tradeoff_study(target: TfSpec, weights: Mapping[str, TfSpec], taps: int = 32,
                          dt: float = 1.0, options: Optional[SynthesisOptions] = None) -> pd.DataFrame:
    """One design per weight; columns weight, hinf_error, h2_error, weighted_hinf_error."""
    rows = []
    for name, weight in weights.items():
        result = design_fir_approximation(FirApproxSpec(target=target, weight=weight, taps=taps, dt=dt),
                                          options)
        rows.append({"weight": name, "hinf_error": result.hinf_error, "h2_error": result.h2_error,
                     "weighted_hinf_error": result.weighted_hinf_error})
    return pd.DataFrame(rows, columns=["weight", "hinf_error", "h2_error", "weighted_hinf_error"])

"""Plant builders and design drivers for multirate, communication, DPCM and FIR-approximation problems."""
from .specs import CommSpec, DecimSpec, DpcmSpec, FirApproxSpec, InterpSpec, TfSpec
from .multirate import (
    MultirateDesign,
    SrcDesign,
    build_decimator_plant,
    build_interpolator_plant,
    design_decimator,
    design_decimator_full,
    design_interpolator,
    design_interpolator_full,
    design_src,
    design_src_full,
    rectangular_wave_response,
    src_overshoot_comparison,
)
from .comm import CommDesign, build_comm_plants, comm_alternation, comm_alternation_full, comm_tradeoff
from .dpcm import DpcmDesign, build_dpcm_plants, design_dpcm, design_dpcm_full, dpcm_comparison
from .approx import FirApproxResult, design_fir_approximation, weight_tradeoff_study

__all__ = [
    "CommSpec", "DecimSpec", "DpcmSpec", "FirApproxSpec", "InterpSpec", "TfSpec",
    "MultirateDesign", "SrcDesign", "build_decimator_plant", "build_interpolator_plant",
    "design_decimator", "design_decimator_full", "design_interpolator", "design_interpolator_full",
    "design_src", "design_src_full", "rectangular_wave_response", "src_overshoot_comparison",
    "CommDesign", "build_comm_plants", "comm_alternation", "comm_alternation_full", "comm_tradeoff",
    "DpcmDesign", "build_dpcm_plants", "design_dpcm", "design_dpcm_full", "dpcm_comparison",
    "FirApproxResult", "design_fir_approximation", "weight_tradeoff_study",
]

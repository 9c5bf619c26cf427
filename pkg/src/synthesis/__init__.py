"""H-infinity FIR synthesis for one-block plants and the bounded-real LMI certificate."""
from .plant import AffineRealization, GeneralizedPlant, affine_closed_loop, affine_realization
from .fir import SynthesisOptions, fir_hinf_synthesis
from .brl import BrlLmi, brl_certificate_check, brl_lmi_assemble
from .taps import format_taps, read_taps, write_taps

__all__ = [
    "AffineRealization", "GeneralizedPlant", "affine_closed_loop", "affine_realization",
    "SynthesisOptions", "fir_hinf_synthesis",
    "BrlLmi", "brl_certificate_check", "brl_lmi_assemble",
    "format_taps", "read_taps", "write_taps",
]

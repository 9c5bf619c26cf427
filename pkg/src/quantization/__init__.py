"""Quantizer, quantized-loop bounds and DPCM streams."""
from .quantizer import QuantizerConfig, quantize
from .bounds import (
    InvariantSetReport,
    PowerGainReport,
    StabilityBound,
    ViolationReport,
    bound_violation_search,
    invariant_set_check,
    power_gain_check,
    stability_bounds,
)
from .dpcm import DpcmDecoder, DpcmEncoder, EncodedStream, dpcm_decode, dpcm_encode
from .signals_io import read_signal, write_signal

__all__ = [
    "QuantizerConfig", "quantize",
    "InvariantSetReport", "PowerGainReport", "StabilityBound", "ViolationReport",
    "bound_violation_search", "invariant_set_check", "power_gain_check", "stability_bounds",
    "DpcmDecoder", "DpcmEncoder", "EncodedStream", "dpcm_decode", "dpcm_encode",
    "read_signal", "write_signal",
]

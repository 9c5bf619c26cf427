"""Frequency responses, norms, simulation and power estimates."""
from .norms import HinfResult, h2_norm, hinf_norm
from .response import evaluate_response, freq_response, frequency_grid, write_frequency_response_csv
from .riccati import BrlCertificate, bounded_real_matrix, bounded_real_riccati, certify_bounded_real
from .timedomain import PowerEstimate, fir_filter_signal, power_norm, simulate

__all__ = [
    "HinfResult", "h2_norm", "hinf_norm",
    "evaluate_response", "freq_response", "frequency_grid", "write_frequency_response_csv",
    "BrlCertificate", "bounded_real_matrix", "bounded_real_riccati", "certify_bounded_real",
    "PowerEstimate", "fir_filter_signal", "power_norm", "simulate",
]

"""Reference setups: audio-rate multirate filters, the ISI channel, the DPCM coder, FIR approximation."""

from functools import lru_cache

import numpy as np
import scipy.optimize
import scipy.signal
import structlog

from .specs import CommSpec, DecimSpec, DpcmSpec, FirApproxSpec, InterpSpec, TfSpec

logger = structlog.get_logger()

# 22.05 kHz band edge, time in units of the slow sampling period
AUDIO_TIME_CONSTANT = 22.05 / np.pi

CHANNEL = TfSpec(num=[1.0, 0.65, -0.52, -0.2975], den=[1.0, 0.0, 0.0, 0.0])
PENALTY_SHAPE = TfSpec(num=[1.0, -1.0], den=[1.0, 0.5])

DPCM_SIGNAL = TfSpec(num=[1.0], den=[100.0, 20.0, 1.0])          # 1/(10s+1)^2
DPCM_QUANT_WEIGHT = 0.5
DPCM_NOISE = TfSpec(num=[0.1 * 0.01753, -0.1 * 0.03506, 0.1 * 0.01753], den=[1.0, 0.572, 0.3147])

CHEBYSHEV_NUM = [1e-3 * c for c in (0.04705, 0.3764, 1.317, 2.635, 3.294, 2.635, 1.317, 0.3764, 0.04705)]
CHEBYSHEV_DEN = [1.0, -4.953, 11.71, -16.95, 16.29, -10.58, 4.552, -1.161, 0.1369]

APPROX_WEIGHTS = {
    "W1": TfSpec(num=[0.7661, -1.305, 0.675], den=[1.0, -1.735, 0.9289]),
    "W2": TfSpec(num=[0.2831, -0.5515, 0.5416, -0.2708, 0.05882],
                 den=[1.0, -2.865, 3.6, -2.268, 0.6056]),
    "W3": TfSpec(num=[1e-3 * c for c in (14.44, -7.838, 19.02, -4.448, 6.697, -0.1857, 0.5287, 0.01134)],
                 den=[1.0, -4.229, 8.561, -10.43, 8.172, -4.089, 1.206, -0.1613]),
}


def reconstruction_prefilter(time_constant: float = AUDIO_TIME_CONSTANT) -> TfSpec:
    """F(s) = 1/((Ts + 1)(0.1Ts + 1))."""
    return TfSpec(num=[1.0], den=np.polymul([time_constant, 1.0], [0.1 * time_constant, 1.0]).tolist())


@lru_cache
def chebyshev_target(exact: bool = True) -> TfSpec:
    """8th-order Chebyshev type-I lowpass target.

    The tabulated coefficients carry four significant digits, which moves
    the clustered poles enough to change the passband gain.  With
    exact=True the target is the cheby1 design whose coefficients are
    closest to the table; exact=False returns the table verbatim.
    """
    if not exact:
        return TfSpec(num=CHEBYSHEV_NUM, den=CHEBYSHEV_DEN)
    num_ref, den_ref = np.asarray(CHEBYSHEV_NUM), np.asarray(CHEBYSHEV_DEN)

    def residual(params: np.ndarray) -> np.ndarray:
        b, a = scipy.signal.cheby1(8, params[0], params[1])
        return np.concatenate([(a - den_ref) / np.abs(den_ref).max(), (b - num_ref) / np.abs(num_ref).max()])

    best = None
    for ripple in (0.1, 0.5, 1.0, 3.0):
        for cutoff in (0.1, 0.2, 0.3, 0.4):
            fit = scipy.optimize.least_squares(residual, x0=[ripple, cutoff],
                                               bounds=([1e-3, 1e-3], [10.0, 0.999]))
            if best is None or fit.cost < best.cost:
                best = fit
    b, a = scipy.signal.cheby1(8, best.x[0], best.x[1])
    logger.debug("Chebyshev target regenerated", ripple_db=best.x[0], cutoff=best.x[1], cost=best.cost)
    return TfSpec(num=b.tolist(), den=a.tolist())


def audio_interpolator_spec(fast_factor: int = 8, fir_order: int = 8) -> InterpSpec:
    return InterpSpec(F=reconstruction_prefilter(), factor=2, delay=2, h=1.0,
                      fast_factor=fast_factor, fir_order=fir_order)


def audio_decimator_spec(fast_factor: int = 8, fir_order: int = 8) -> DecimSpec:
    return DecimSpec(F=reconstruction_prefilter(), factor=2, delay=2, h=1.0,
                     fast_factor=fast_factor, fir_order=fir_order)


def rate_converter_specs(fir_order: int = 8) -> tuple[InterpSpec, DecimSpec]:
    """Period 1 → 4/3 through the common fast period 1/3 (L = 3, M = 4)."""
    interp = InterpSpec(F=reconstruction_prefilter(), factor=3, delay=2, h=1.0,
                        fast_factor=12, fir_order=fir_order)
    decim = DecimSpec(F=reconstruction_prefilter(AUDIO_TIME_CONSTANT / 3.0), factor=4, delay=2,
                      h=4.0 / 3.0, fast_factor=16, fir_order=fir_order)
    return interp, decim


def isi_channel_spec(penalty_gain: float = 0.0, compression: int = 1, iterations: int = 5,
                     fir_order: int = 8) -> CommSpec:
    return CommSpec(F=TfSpec(num=[1.0], den=[10.0, 1.0]), channel=CHANNEL,
                    noise_weight=TfSpec(num=[1.0]), penalty_weight=PENALTY_SHAPE,
                    penalty_gain=penalty_gain, compression=compression, delay=2, h=1.0,
                    fast_factor=8, receiver_order=fir_order, transmitter_order=fir_order,
                    iterations=iterations)


def dpcm_spec(predictor_order: int = 4, decoder_order: int = 8) -> DpcmSpec:
    return DpcmSpec(W=DPCM_SIGNAL, quant_weight=DPCM_QUANT_WEIGHT, noise_weight=DPCM_NOISE,
                    delay=2, h=1.0, fast_factor=8, predictor_order=predictor_order,
                    decoder_order=decoder_order)


def fir_approx_spec(weight: str = "W2", taps: int = 32) -> FirApproxSpec:
    return FirApproxSpec(target=chebyshev_target(), weight=APPROX_WEIGHTS[weight], taps=taps)

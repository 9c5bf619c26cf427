"""Frequency-response evaluation, grids and CSV emission."""

from pathlib import Path
from typing import Optional, Union

import numpy as np
import pandas as pd
import scipy.linalg
import structlog

from ..errors import ValidationError
from ..models import FrequencyResponse, StateSpaceModel

logger = structlog.get_logger()

# below this distance between e^{jω} and an eigenvalue the resolvent is not trusted
POLE_GUARD = 1e-10


def frequency_grid(n_points: int, poles: Optional[np.ndarray] = None,
                   extra: Optional[np.ndarray] = None) -> np.ndarray:
    """Hybrid linear/logarithmic grid on [0, π], plus the angles of lightly damped poles."""
    half = max(n_points // 2, 2)
    linear = np.linspace(0.0, np.pi, half)
    logarithmic = np.logspace(-4, np.log10(np.pi), n_points - half)
    parts = [linear, logarithmic]
    if poles is not None and np.size(poles):
        angles = np.abs(np.angle(np.asarray(poles)))
        parts.append(angles[np.abs(poles) > 0.5])
    if extra is not None:
        parts.append(np.asarray(extra, dtype=float))
    grid = np.clip(np.concatenate(parts), 0.0, np.pi)
    return np.unique(grid)


def evaluate_response(sys: StateSpaceModel, omegas: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Raw D + C(e^{jω}I − A)⁻¹B, shaped (K, p, m), with a mask of guarded points."""
    omegas = np.asarray(omegas, dtype=float)
    points = np.exp(1j * omegas)
    K = omegas.size
    values = np.broadcast_to(sys.D.astype(complex), (K,) + sys.D.shape).copy()
    flagged = np.zeros(K, dtype=bool)
    n = sys.n_states
    if n == 0 or K == 0:
        return values, flagged
    eigenvalues = scipy.linalg.eigvals(sys.A)
    scale = 1.0 + np.linalg.norm(sys.A, 2)
    distance = np.min(np.abs(points[:, None] - eigenvalues[None, :]), axis=1)
    flagged = distance < POLE_GUARD * scale
    ok = ~flagged
    if np.any(ok):
        pencil = points[ok, None, None] * np.eye(n)[None] - sys.A[None]
        rhs = np.broadcast_to(sys.B.astype(complex), (int(ok.sum()),) + sys.B.shape)
        values[ok] += sys.C[None] @ np.linalg.solve(pencil, rhs)
    values[flagged] = np.nan
    if np.any(flagged):
        logger.warning("Frequency points too close to poles", count=int(flagged.sum()))
    return values, flagged


def freq_response(sys: StateSpaceModel, grid) -> FrequencyResponse:
    if not sys.is_discrete:
        raise ValidationError("freq_response evaluates discrete-time systems only")
    omegas = np.asarray(grid, dtype=float)
    values, flagged = evaluate_response(sys, omegas)
    return FrequencyResponse(omegas, values, flagged)


def max_singular_values(values: np.ndarray) -> np.ndarray:
    return np.linalg.svd(values, compute_uv=False)[..., 0]


def write_frequency_response_csv(response: FrequencyResponse, path: Union[str, Path],
                                 period: float = 1.0) -> Path:
    """CSV with `omega,gain_db,flagged[,re_ij,im_ij…]`; ω in rad/s for sampling period `period`.

    Points flagged near a pole get an empty gain; -400 dB marks a true zero gain.
    """
    path = Path(path)
    flagged = np.asarray(response.flagged, dtype=bool)
    gains = np.where(response.gains > 0, response.gains, 1e-20)
    gains = np.where(flagged, np.nan, gains)
    columns = {
        "omega": response.omegas / period,
        "gain_db": 20.0 * np.log10(gains),
        "flagged": flagged,
    }
    _, p, m = response.values.shape
    for i in range(p):
        for j in range(m):
            columns[f"re_{i + 1}{j + 1}"] = response.values[:, i, j].real
            columns[f"im_{i + 1}{j + 1}"] = response.values[:, i, j].imag
    frame = pd.DataFrame(columns)
    frame.to_csv(path, index=False, lineterminator="\n", float_format="%.10g")
    logger.info("Wrote frequency response", path=str(path), points=len(frame))
    return path

"""Raw signal files: one decimal sample per line."""

from pathlib import Path
from typing import Union

import numpy as np
import structlog

from ..errors import ValidationError
from ..models import Signal

logger = structlog.get_logger()


def read_signal(path: Union[str, Path], period: float = 1.0) -> Signal:
    try:
        samples = np.loadtxt(path, dtype=float, ndmin=1, comments="#")
    except OSError as exc:
        raise ValidationError(f"cannot read signal file {path}: {exc}") from exc
    except ValueError as exc:
        raise ValidationError(f"malformed signal file {path}: {exc}") from exc
    if samples.ndim != 1:
        raise ValidationError(f"signal file {path} must hold one sample per line")
    return Signal(samples, period)


def write_signal(signal: Signal, path: Union[str, Path]) -> Path:
    path = Path(path)
    np.savetxt(path, signal.scalar(), fmt="%.17g", newline="\n")
    logger.info("Wrote signal", path=str(path), samples=signal.length)
    return path

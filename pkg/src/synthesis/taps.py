"""Plain-text tap files: `# ` header with dims and rate, then `k c_11 c_12 …` per tap (row-major)."""

from pathlib import Path
from typing import Union

import numpy as np
import structlog

from ..errors import ValidationError
from ..models import FirFilter

logger = structlog.get_logger()


def format_taps(fir: FirFilter, label: str = "") -> str:
    lines = [
        f"# liftsynth taps {label}".rstrip(),
        f"# order={fir.order} outputs={fir.n_outputs} inputs={fir.n_inputs} period={fir.dt:.17g}",
    ]
    for k, tap in enumerate(fir.taps):
        values = " ".join(f"{c:.17g}" for c in tap.reshape(-1))
        lines.append(f"{k} {values}")
    return "\n".join(lines) + "\n"


def write_taps(fir: FirFilter, path: Union[str, Path], label: str = "") -> Path:
    path = Path(path)
    path.write_text(format_taps(fir, label), encoding="utf-8", newline="\n")
    logger.info("Wrote taps", path=str(path), order=fir.order)
    return path


def read_taps(path: Union[str, Path]) -> FirFilter:
    header: dict[str, str] = {}
    rows = []
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ValidationError(f"cannot read tap file {path}: {exc}") from exc
    for number, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            for token in line[1:].split():
                if "=" in token:
                    key, value = token.split("=", 1)
                    header[key] = value
            continue
        try:
            rows.append([float(x) for x in line.split()[1:]])
        except ValueError as exc:
            raise ValidationError(f"tap file {path} line {number}: {exc}") from exc
    try:
        p, m = int(header["outputs"]), int(header["inputs"])
        period = float(header["period"])
    except KeyError as exc:
        raise ValidationError(f"tap file {path} lacks header field {exc}") from exc
    except ValueError as exc:
        raise ValidationError(f"tap file {path} has a malformed header: {exc}") from exc
    if not rows or any(len(row) != p * m for row in rows):
        raise ValidationError(f"tap file {path}: rows do not match {p}x{m} taps")
    return FirFilter(np.asarray(rows, dtype=float).reshape(-1, p, m), period)

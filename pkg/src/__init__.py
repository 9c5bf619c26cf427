"""liftsynth - sampled-data H-infinity design of multirate, communication and DPCM filters."""

__version__ = "0.1.0"

from .config import get_settings
from .models import DesignReport, FirFilter, Signal, StateSpaceModel, TransferFunction

__all__ = [
    "get_settings", "DesignReport", "FirFilter", "Signal", "StateSpaceModel",
    "TransferFunction", "__version__",
]

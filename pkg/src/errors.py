"""Exception hierarchy for liftsynth."""

from typing import Optional


class LiftSynthError(Exception):
    """Base class for every error raised by the toolkit."""


class ValidationError(LiftSynthError):
    """Bad dimensions, domain mismatch, improper transfer function or malformed config."""


class UnstableSystemError(LiftSynthError):
    """A block that must be Schur stable is not."""

    def __init__(self, message: str, spectral_radius: Optional[float] = None):
        if spectral_radius is not None:
            message = f"{message} (spectral radius {spectral_radius:.6g})"
        super().__init__(message)
        self.spectral_radius = spectral_radius


class NumericalError(LiftSynthError):
    """A numerical kernel failed (eigen-solver, singular feedthrough, defective matrix)."""


class BracketError(LiftSynthError):
    """The H-infinity bisection could not bracket the norm."""


class ConvergenceError(LiftSynthError):
    """An iteration cap was hit and no usable iterate exists."""

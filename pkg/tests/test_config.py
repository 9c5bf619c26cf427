"""Tests for settings, errors and core models."""

import numpy as np
import pydantic
import pytest

from src.config import Settings, get_settings
from src.errors import LiftSynthError, UnstableSystemError, ValidationError
from src.models import FirFilter, Signal, StateSpaceModel, TransferFunction, Variable


class TestConfig:
    """Test configuration module."""

    def test_settings_defaults(self, monkeypatch):
        """Test default settings values."""
        for name in ("LIFTSYNTH_THREADS", "LIFTSYNTH_HINF_TOL_REL", "LIFTSYNTH_SYNTHESIS_GAP_REL"):
            monkeypatch.delenv(name, raising=False)
        settings = Settings(_env_file=None)

        assert settings.app_name == "liftsynth"
        assert settings.threads == 1
        assert settings.hinf_tol_rel == 1e-4
        assert settings.synthesis_gap_rel == 1e-3

    def test_settings_cached(self):
        """Test that settings are cached."""
        assert get_settings() is get_settings()

    def test_env_override(self, monkeypatch):
        """Environment variables with the LIFTSYNTH_ prefix override defaults."""
        monkeypatch.setenv("LIFTSYNTH_THREADS", "4")
        monkeypatch.setenv("LIFTSYNTH_GRID_POINTS", "1024")
        settings = Settings(_env_file=None)

        assert settings.threads == 4
        assert settings.grid_points == 1024

    def test_invalid_override_rejected(self, monkeypatch):
        """A zero worker count is not a valid setting."""
        monkeypatch.setenv("LIFTSYNTH_THREADS", "0")
        with pytest.raises(pydantic.ValidationError):
            Settings(_env_file=None)


class TestErrors:
    """Test the exception hierarchy."""

    def test_hierarchy(self):
        """Every toolkit error is a LiftSynthError."""
        assert issubclass(ValidationError, LiftSynthError)
        assert issubclass(UnstableSystemError, LiftSynthError)

    def test_unstable_carries_radius(self):
        """The spectral radius travels with the exception."""
        exc = UnstableSystemError("inverse is unstable", spectral_radius=1.25)
        assert exc.spectral_radius == 1.25
        assert "1.25" in str(exc)


class TestModels:
    """Test transfer functions, state-space models, signals and FIR filters."""

    def test_transfer_function_strips_leading_zeros(self):
        """Leading numerator zeros do not count towards the degree."""
        tf = TransferFunction([0.0, 0.0, 1.0], [1.0, -0.5])
        assert tf.num.tolist() == [1.0]
        assert tf.is_strictly_proper
        assert tf.dt == 1.0

    def test_improper_rejected(self):
        """Numerator degree above denominator degree is an error."""
        with pytest.raises(ValidationError):
            TransferFunction([1.0, 0.0, 0.0], [1.0, 0.5])

    def test_continuous_has_no_period(self):
        """s-domain transfer functions carry no sampling period."""
        with pytest.raises(ValidationError):
            TransferFunction([1.0], [1.0, 1.0], Variable.S, dt=0.1)

    def test_stability(self):
        """Discrete stability means poles inside the unit disc."""
        assert TransferFunction([1.0], [1.0, -0.5]).is_stable()
        assert not TransferFunction([1.0], [1.0, -1.0]).is_stable()

    def test_state_space_shape_checks(self):
        """Inconsistent blocks are rejected."""
        with pytest.raises(ValidationError):
            StateSpaceModel(np.eye(2), np.ones((3, 1)), np.ones((1, 2)), [[0.0]], 1.0)

    def test_static_evaluate(self):
        """A memoryless model evaluates to its gain everywhere."""
        sys = StateSpaceModel.static([[2.0, -1.0]], 1.0)
        assert sys.n_states == 0
        assert np.allclose(sys.evaluate(1j), [[2.0, -1.0]])

    def test_signal_reshape(self):
        """1-D samples become a single column."""
        x = Signal([1.0, 2.0, 3.0], period=0.5)
        assert x.samples.shape == (3, 1)
        assert x.scalar().tolist() == [1.0, 2.0, 3.0]
        with pytest.raises(ValidationError):
            Signal([1.0], period=0.0)

    def test_fir_state_space_matches_response(self):
        """The shift-register realization has the same frequency response as the taps."""
        fir = FirFilter(np.array([0.5, -0.25, 0.125, 1.0]), dt=1.0)
        sys = fir.to_state_space()
        omega = 0.7
        expected = fir.response(np.array([omega]))[0]
        assert np.allclose(sys.evaluate(np.exp(1j * omega)), expected)

    def test_fir_multichannel_state_space(self):
        """MIMO taps realize the matching transfer matrix."""
        taps = np.arange(12, dtype=float).reshape(3, 2, 2)
        fir = FirFilter(taps)
        z = np.exp(0.3j)
        expected = taps[0] + taps[1] / z + taps[2] / z ** 2
        assert np.allclose(fir.to_state_space().evaluate(z), expected)

    def test_fir_vector_ordering(self):
        """as_vector and from_vector are inverse."""
        fir = FirFilter(np.arange(12, dtype=float).reshape(3, 2, 2))
        back = FirFilter.from_vector(fir.as_vector(), 2, 2, 2)
        assert np.array_equal(back.taps, fir.taps)

    def test_fir_shift_pad_convolve(self):
        """Shifting, padding and convolution act on the tap sequence."""
        fir = FirFilter(np.array([1.0, 2.0]))
        assert fir.shifted(2).coefficients.tolist() == [0.0, 0.0, 1.0, 2.0]
        assert fir.padded(3).coefficients.tolist() == [1.0, 2.0, 0.0, 0.0]
        assert fir.convolve(FirFilter(np.array([1.0, -1.0]))).coefficients.tolist() == [1.0, 1.0, -2.0]
        with pytest.raises(ValidationError):
            fir.padded(0)


if __name__ == "__main__":
    pytest.main([__file__, "-v"])

"""Tests for norms, frequency responses and time-domain helpers."""

import numpy as np
import pandas as pd
import pytest
import scipy.signal

from src.analysis.norms import h2_norm, hinf_norm, markov_bound
from src.analysis.response import (
    evaluate_response,
    freq_response,
    frequency_grid,
    max_singular_values,
    write_frequency_response_csv,
)
from src.analysis.riccati import bounded_real_matrix, certify_bounded_real
from src.analysis.timedomain import power_norm, simulate
from src.errors import UnstableSystemError, ValidationError
from src.models import Signal, StateSpaceModel, TransferFunction
from src.systems.sslib import impulse_response, tf_to_ss


def first_order():
    return tf_to_ss(TransferFunction([1.0], [1.0, -0.5]))


class TestHinfNorm:
    """Test the H-infinity norm and its certificate."""

    def test_first_order(self):
        """‖1/(z − 0.5)‖∞ = 2, reached at ω = 0."""
        result = hinf_norm(first_order())
        assert abs(result.gamma - 2.0) <= 2.0 * 1e-4
        assert result.peak_omega == pytest.approx(0.0, abs=1e-3)
        assert result.certificate is not None and result.certificate.feasible

    def test_random_systems_against_dense_grid(self, make_system, rng):
        """50 random Schur systems agree with a 10⁵-point grid to the bisection tolerance."""
        omegas = np.linspace(0.0, np.pi, 100_000)
        for _ in range(50):
            n = int(rng.integers(1, 7))
            m, p = int(rng.integers(1, 3)), int(rng.integers(1, 3))
            sys = make_system(n, m=m, p=p, radius=float(rng.uniform(0.3, 0.85)))
            values, _ = evaluate_response(sys, omegas)
            dense = float(np.max(max_singular_values(values)))
            result = hinf_norm(sys)
            assert result.gamma >= dense * (1.0 - 2e-4)
            assert result.gamma <= dense * (1.0 + 2e-4)

    def test_certificate_is_negative_definite(self, make_system):
        """The LMI block matrix at the certified level has no positive eigenvalue beyond tolerance."""
        sys = make_system(4, m=2, p=2)
        result = hinf_norm(sys)
        cert = result.certificate
        assert cert.feasible
        assert np.all(np.linalg.eigvalsh(cert.P) > 0)
        matrix = bounded_real_matrix(sys.A, sys.B, sys.C, sys.D, cert.P, cert.gamma)
        assert np.max(np.linalg.eigvalsh(matrix)) <= 1e-8 * max(1.0, cert.gamma, np.linalg.norm(cert.P, 2))

    def test_infeasible_below_norm(self, make_system):
        """No certificate exists below the norm."""
        sys = make_system(3)
        gamma = hinf_norm(sys).gamma
        assert not certify_bounded_real(sys, 0.9 * gamma).feasible

    def test_static_and_zero(self):
        """Stateless systems use the largest singular value of D."""
        assert hinf_norm(StateSpaceModel.static([[3.0, 4.0]], 1.0)).gamma == pytest.approx(5.0)
        zero = StateSpaceModel([[0.5]], [[1.0]], [[0.0]], [[0.0]], 1.0)
        assert hinf_norm(zero).gamma == 0.0

    def test_upper_bounds(self, make_system):
        """The summed Markov series bounds the norm from above."""
        sys = make_system(3)
        total, exact = markov_bound(sys)
        assert exact
        assert hinf_norm(sys).gamma <= total * (1.0 + 1e-4)

    def test_unstable_rejected(self):
        """Norms are undefined for unstable systems."""
        with pytest.raises(UnstableSystemError):
            hinf_norm(tf_to_ss(TransferFunction([1.0], [1.0, -1.1])))

    def test_continuous_rejected(self):
        """Norms are computed for discrete-time systems only."""
        with pytest.raises(ValidationError):
            hinf_norm(StateSpaceModel([[-1.0]], [[1.0]], [[1.0]], [[0.0]]))


class TestH2Norm:
    """Test the H2 norm."""

    def test_first_order(self):
        """‖1/(z − 0.5)‖₂² = Σ 0.25ᵏ = 4/3."""
        assert h2_norm(first_order()) == pytest.approx(np.sqrt(4.0 / 3.0), rel=1e-10)

    def test_matches_impulse_energy(self, make_system):
        """H2 norm is the energy of the impulse response."""
        sys = make_system(4, m=2, p=2, radius=0.7)
        response = impulse_response(sys, 400)
        assert h2_norm(sys) == pytest.approx(np.sqrt(np.sum(response ** 2)), rel=1e-8)


class TestFrequencyResponse:
    """Test grids, evaluation and CSV output."""

    def test_grid(self):
        """The grid covers [0, π], is sorted and includes lightly damped pole angles."""
        grid = frequency_grid(64, poles=np.array([0.99 * np.exp(1.234j)]))
        assert grid[0] == 0.0 and grid[-1] == pytest.approx(np.pi)
        assert np.all(np.diff(grid) > 0)
        assert np.any(np.isclose(grid, 1.234))

    def test_matches_scipy(self):
        """Agrees with scipy.signal.freqz."""
        tf = TransferFunction([0.2, 0.1], [1.0, -0.6, 0.25])
        omegas = np.linspace(0.0, np.pi, 50)
        response = freq_response(tf_to_ss(tf), omegas)
        _, expected = scipy.signal.freqz(tf.num, tf.den, worN=omegas)
        assert np.allclose(response.values[:, 0, 0], expected)

    def test_pole_on_circle_is_flagged(self):
        """Points on a unit-circle pole are flagged rather than evaluated."""
        response = freq_response(tf_to_ss(TransferFunction([1.0], [1.0, -1.0])), np.array([0.0, 1.0]))
        assert response.flagged.tolist() == [True, False]
        assert np.isnan(response.gains[0])

    def test_csv(self, tmp_path):
        """CSV columns hold ω, gain in dB and the real and imaginary parts."""
        response = freq_response(first_order(), np.linspace(0.0, np.pi, 5))
        path = write_frequency_response_csv(response, tmp_path / "fr.csv", period=0.5)
        frame = pd.read_csv(path)
        assert list(frame.columns) == ["omega", "gain_db", "flagged", "re_11", "im_11"]
        assert frame["gain_db"].iloc[0] == pytest.approx(20.0 * np.log10(2.0))
        assert frame["omega"].iloc[-1] == pytest.approx(2.0 * np.pi)
        assert not frame["flagged"].any()

    def test_csv_leaves_flagged_gain_empty(self, tmp_path):
        """A point on a pole is written with an empty gain, not the zero-gain floor."""
        response = freq_response(tf_to_ss(TransferFunction([1.0], [1.0, -1.0])), np.array([0.0, 0.5]))
        frame = pd.read_csv(write_frequency_response_csv(response, tmp_path / "fr.csv"))
        assert frame["flagged"].tolist() == [True, False]
        assert np.isnan(frame["gain_db"].iloc[0])
        assert frame["gain_db"].iloc[1] == pytest.approx(20.0 * np.log10(response.gains[1]))

    def test_csv_zero_gain_floor(self, tmp_path):
        """A finite zero gain is written at the -400 dB floor."""
        zero = StateSpaceModel([[0.5]], [[1.0]], [[0.0]], [[0.0]], 1.0)
        frame = pd.read_csv(write_frequency_response_csv(freq_response(zero, np.array([0.0, 1.0])),
                                                         tmp_path / "zero.csv"))
        assert frame["gain_db"].tolist() == pytest.approx([-400.0, -400.0])


class TestTimeDomain:
    """Test simulation and power estimates."""

    def test_simulate_matches_lfilter(self, rng):
        """State-space simulation equals direct-form filtering."""
        tf = TransferFunction([0.5, 0.2], [1.0, -0.3, 0.1])
        u = Signal(rng.standard_normal(200))
        y = simulate(tf_to_ss(tf), u)
        assert np.allclose(y.scalar(), scipy.signal.lfilter(tf.num, tf.den, u.scalar()))

    def test_power_of_sine(self):
        """A unit sine has power 1/√2."""
        k = np.arange(100_000)
        estimate = power_norm(Signal(np.sin(0.37 * k)), 50_000)
        assert estimate.window == 50_000
        assert estimate.value == pytest.approx(1.0 / np.sqrt(2.0), rel=1e-3)

    def test_power_window(self):
        """Short signals use every sample; bad windows are rejected."""
        assert power_norm(Signal([3.0, 4.0]), 10).window == 2
        with pytest.raises(ValidationError):
            power_norm(Signal([1.0]), 0)


if __name__ == "__main__":
    pytest.main([__file__, "-v"])

"""Tests for state-space algebra and discretization."""

import numpy as np
import pytest

from src.errors import NumericalError, UnstableSystemError, ValidationError
from src.models import StateSpaceModel, TransferFunction, Variable
from src.systems.sslib import (
    augment_delay,
    block_diagonal,
    c2d_zoh,
    connect_parallel,
    connect_series,
    delay_line,
    feedback_inverse_unity,
    impulse_response,
    is_schur,
    postmultiply,
    premultiply,
    require_schur,
    spectral_radius,
    stack_inputs,
    stack_outputs,
    tf_to_ss,
)

POINTS = (np.exp(0.4j), np.exp(2.1j), 1.3 + 0.2j)


class TestRealization:
    """Test transfer-function realization and discretization."""

    def test_first_order_discrete(self):
        """1/(z − 0.5) has DC gain 2."""
        sys = tf_to_ss(TransferFunction([1.0], [1.0, -0.5]))
        assert sys.dt == 1.0
        assert np.isclose(sys.evaluate(1.0)[0, 0].real, 2.0)

    def test_matches_transfer_function(self):
        """Realization and rational function agree off the unit circle too."""
        tf = TransferFunction([0.3, -0.1, 0.05], [1.0, -0.9, 0.2], dt=0.25)
        sys = tf_to_ss(tf)
        assert sys.dt == 0.25
        for z in POINTS:
            assert np.isclose(sys.evaluate(z)[0, 0], tf.evaluate(z))

    def test_static_transfer_function(self):
        """A constant becomes a stateless model."""
        sys = tf_to_ss(TransferFunction([3.0], [2.0]))
        assert sys.n_states == 0
        assert sys.D[0, 0] == 1.5

    def test_c2d_first_order(self):
        """ZOH of 1/(s+1) has pole e^{-h} and unit DC gain."""
        h = 0.5
        sys = c2d_zoh(tf_to_ss(TransferFunction([1.0], [1.0, 1.0], Variable.S)), h)
        assert sys.dt == h
        assert np.isclose(sys.A[0, 0], np.exp(-h))
        assert np.isclose(sys.evaluate(1.0)[0, 0].real, 1.0)

    def test_c2d_integrator(self):
        """ZOH of 1/s at h = 0.5 is A_d = 1, B_d = h."""
        sys = c2d_zoh(StateSpaceModel([[0.0]], [[1.0]], [[1.0]], [[0.0]]), 0.5)
        assert np.allclose(sys.A, [[1.0]], atol=1e-15)
        assert np.allclose(sys.B, [[0.5]], atol=1e-15)
        assert np.allclose(sys.C, [[1.0]]) and np.allclose(sys.D, [[0.0]])

    def test_c2d_double_integrator(self):
        """A nilpotent A discretizes to its truncated exponential series."""
        sys = c2d_zoh(StateSpaceModel([[0.0, 1.0], [0.0, 0.0]], [[0.0], [1.0]], [[1.0, 0.0]], [[0.0]]), 1.0)
        assert np.allclose(sys.A, [[1.0, 1.0], [0.0, 1.0]], atol=1e-14)
        assert np.allclose(sys.B, [[0.5], [1.0]], atol=1e-14)

    @pytest.mark.parametrize("n", [1, 2, 4, 6])
    def test_c2d_step_response_matches_sampled_continuous(self, rng, n):
        """The ZOH step response equals the continuous step response at t = kh."""
        h, steps = 0.3, 40
        eigenvalues = -rng.uniform(0.2, 3.0, n)
        V = np.eye(n) + 0.3 * rng.standard_normal((n, n))
        V_inv = np.linalg.inv(V)
        A = V @ np.diag(eigenvalues) @ V_inv
        B, C, D = rng.standard_normal((n, 2)), rng.standard_normal((2, n)), rng.standard_normal((2, 2))
        sys = c2d_zoh(StateSpaceModel(A, B, C, D), h)

        x = np.zeros((n, 2))
        for k in range(steps):
            t = k * h
            # A⁻¹(e^{At} − I) from the eigendecomposition
            integral = V @ np.diag(np.expm1(eigenvalues * t) / eigenvalues) @ V_inv
            expected = C @ integral @ B + D
            assert np.allclose(C @ x + D, expected, rtol=1e-9, atol=1e-9)
            x = sys.A @ x + sys.B

    def test_c2d_rejects_discrete(self):
        """Only continuous models are discretized."""
        with pytest.raises(ValidationError):
            c2d_zoh(StateSpaceModel.static([[1.0]], 1.0), 0.1)


class TestInterconnection:
    """Test series, parallel and stacking against transfer-matrix algebra."""

    def test_series_order(self, make_system):
        """g1 runs first: the cascade is g2(z)·g1(z)."""
        g1 = make_system(3, m=2, p=3)
        g2 = make_system(2, m=3, p=1)
        sys = connect_series(g1, g2)
        for z in POINTS:
            assert np.allclose(sys.evaluate(z), g2.evaluate(z) @ g1.evaluate(z))

    def test_parallel_signs(self, make_system):
        """Parallel connection sums with the given signs."""
        g1, g2 = make_system(2), make_system(3)
        sys = connect_parallel(g1, g2, signs=(1.0, -1.0))
        for z in POINTS:
            assert np.allclose(sys.evaluate(z), g1.evaluate(z) - g2.evaluate(z))

    def test_stacking(self, make_system):
        """Input stacking concatenates columns, output stacking rows."""
        g1, g2 = make_system(2), make_system(1)
        z = POINTS[0]
        assert np.allclose(stack_inputs(g1, g2).evaluate(z), np.hstack([g1.evaluate(z), g2.evaluate(z)]))
        assert np.allclose(stack_outputs(g1, g2).evaluate(z), np.vstack([g1.evaluate(z), g2.evaluate(z)]))
        assert block_diagonal(g1, g2).D.shape == (2, 2)

    def test_static_gains(self, make_system):
        """Pre- and post-multiplication by constant matrices."""
        g = make_system(2, m=2, p=2)
        M = np.array([[1.0, 2.0], [0.0, -1.0]])
        z = POINTS[1]
        assert np.allclose(premultiply(M, g).evaluate(z), M @ g.evaluate(z))
        assert np.allclose(postmultiply(g, M).evaluate(z), g.evaluate(z) @ M)
        with pytest.raises(ValidationError):
            premultiply(np.ones((1, 3)), g)

    def test_domain_mismatch(self):
        """Systems at different periods cannot be connected."""
        with pytest.raises(ValidationError):
            connect_series(StateSpaceModel.static([[1.0]], 1.0), StateSpaceModel.static([[1.0]], 0.5))

    def test_delay(self, make_system):
        """augment_delay multiplies by z^{-m} on either side."""
        g = make_system(2)
        for side in ("input", "output"):
            delayed = augment_delay(g, 3, side=side)
            for z in POINTS:
                assert np.allclose(delayed.evaluate(z), z ** -3 * g.evaluate(z))
        assert delay_line(2, 0, 1.0).n_states == 0
        with pytest.raises(ValidationError):
            augment_delay(g, 1, side="middle")


class TestStability:
    """Test spectral radius, Schur checks and the unity-feedback inverse."""

    def test_spectral_radius(self):
        """Largest eigenvalue modulus, zero for empty matrices."""
        assert np.isclose(spectral_radius([[0.0, -0.9], [0.9, 0.0]]), 0.9)
        assert spectral_radius(np.zeros((0, 0))) == 0.0
        assert is_schur([[0.5]])
        assert not is_schur([[1.0]])

    def test_require_schur(self):
        """The accumulator is rejected with its spectral radius attached."""
        with pytest.raises(UnstableSystemError) as info:
            require_schur(tf_to_ss(TransferFunction([1.0], [1.0, -1.0])))
        assert np.isclose(info.value.spectral_radius, 1.0)

    def test_feedback_inverse(self):
        """(1 + K1)⁻¹ evaluated pointwise."""
        k1 = tf_to_ss(TransferFunction([0.5], [1.0, -0.3]))
        inverse = feedback_inverse_unity(k1)
        for z in POINTS:
            assert np.allclose(inverse.evaluate(z), 1.0 / (1.0 + k1.evaluate(z)))

    def test_feedback_inverse_unstable(self):
        """K1 = 2/z puts the inverse pole at −2."""
        k1 = StateSpaceModel([[0.0]], [[1.0]], [[2.0]], [[0.0]], 1.0)
        with pytest.raises(UnstableSystemError) as info:
            feedback_inverse_unity(k1)
        assert np.isclose(info.value.spectral_radius, 2.0)

    def test_feedback_inverse_singular(self):
        """1 + D = 0 is not well posed."""
        with pytest.raises(NumericalError):
            feedback_inverse_unity(StateSpaceModel.static([[-1.0]], 1.0))

    def test_impulse_response(self):
        """Markov parameters of 1/(z − 0.5) are 0, 1, 0.5, 0.25, …"""
        response = impulse_response(tf_to_ss(TransferFunction([1.0], [1.0, -0.5])), 5)
        assert np.allclose(response[:, 0, 0], [0.0, 1.0, 0.5, 0.25, 0.125])


if __name__ == "__main__":
    pytest.main([__file__, "-v"])

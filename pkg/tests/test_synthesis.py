"""Tests for generalized plants, the bounded-real LMI and FIR synthesis."""

import numpy as np
import pytest

from src.analysis.norms import hinf_norm
from src.analysis.response import freq_response, max_singular_values
from src.analysis.riccati import certify_bounded_real
from src.errors import UnstableSystemError, ValidationError
from src.models import FirFilter, InnerSolver, StateSpaceModel, TransferFunction
from src.synthesis.brl import brl_certificate_check, brl_lmi_assemble
from src.synthesis.fir import SynthesisOptions, fir_hinf_synthesis
from src.synthesis.plant import GeneralizedPlant, affine_closed_loop, affine_realization
from src.synthesis.taps import format_taps, read_taps, write_taps
from src.systems.sslib import delay_line, tf_to_ss


def matching_plant(g11: StateSpaceModel) -> GeneralizedPlant:
    """T = G11 − K: plain model matching."""
    return GeneralizedPlant(
        g11=g11,
        g12=StateSpaceModel.static([[-1.0]], g11.dt),
        g21=StateSpaceModel.identity(1, g11.dt),
        name="matching",
    )


class TestGeneralizedPlant:
    """Test plant validation and closed loops."""

    def test_dimension_mismatch(self):
        """G21 must take the same inputs as G11."""
        with pytest.raises(ValidationError):
            GeneralizedPlant(
                g11=StateSpaceModel.static([[1.0, 0.0]], 1.0),
                g12=StateSpaceModel.static([[-1.0]], 1.0),
                g21=StateSpaceModel.static([[1.0]], 1.0),
            )

    def test_unstable_block(self):
        """Every block must be Schur stable."""
        with pytest.raises(UnstableSystemError):
            matching_plant(tf_to_ss(TransferFunction([1.0], [1.0, -1.0])))

    def test_affine_realization_matches_closed_loop(self, make_system, rng):
        """The tap-affine realization has the closed loop's transfer matrix."""
        g11 = make_system(2, m=2, p=2)
        g21 = make_system(3, m=2, p=1)
        plant = GeneralizedPlant(g11, StateSpaceModel.static([[1.0], [-0.5]], 1.0), g21)
        order = 2
        alpha = rng.standard_normal((order + 1) * plant.n_u * plant.n_y)
        K = FirFilter.from_vector(alpha, order, plant.n_u, plant.n_y)
        realized = affine_realization(plant, order).realize(alpha)
        closed = affine_closed_loop(plant, K)
        for z in (np.exp(0.3j), np.exp(2.5j), 0.4 + 1.1j):
            assert np.allclose(realized.evaluate(z), closed.evaluate(z))

    def test_grid_maximum_is_convex_in_taps(self, make_system, rng):
        """The grid maximum at the midpoint of two tap vectors is at most the average of the endpoints."""
        grid = np.linspace(0.0, np.pi, 257)

        def grid_max(plant, alpha, order):
            K = FirFilter.from_vector(alpha, order, plant.n_u, plant.n_y)
            response = freq_response(affine_closed_loop(plant, K), grid)
            return float(np.max(max_singular_values(response.values)))

        order = 3
        for _ in range(5):
            plant = GeneralizedPlant(make_system(3, m=2, p=2), make_system(2, m=1, p=2), make_system(2, m=2, p=2))
            dim = (order + 1) * plant.n_u * plant.n_y
            a1, a2 = rng.standard_normal(dim), rng.standard_normal(dim)
            midpoint = grid_max(plant, 0.5 * (a1 + a2), order)
            assert midpoint <= 0.5 * (grid_max(plant, a1, order) + grid_max(plant, a2, order)) + 1e-10

    def test_filter_slot_mismatch(self):
        """The filter must fit the plant's slot."""
        plant = matching_plant(StateSpaceModel.static([[1.0]], 1.0))
        with pytest.raises(ValidationError):
            affine_closed_loop(plant, FirFilter(np.zeros((2, 2, 1))))


class TestBrlLmi:
    """Test the bounded-real LMI as data."""

    def test_certificate_satisfies_assembled_lmi(self, make_system, rng):
        """The certificate's P makes the tap-affine LMI negative at the tap values it was issued for."""
        plant = GeneralizedPlant(make_system(2), StateSpaceModel.static([[-1.0]], 1.0), make_system(2))
        realization = affine_realization(plant, 3)
        alpha = 0.3 * rng.standard_normal(realization.n_alpha)
        sys = realization.realize(alpha)
        gamma = 1.05 * hinf_norm(sys).gamma
        certificate = certify_bounded_real(sys, gamma)
        lmi = brl_lmi_assemble(realization, gamma)
        assert certificate.feasible
        assert lmi.size == sys.n_states + 2
        assert lmi.max_eigenvalue(certificate.P, alpha) <= 1e-8 * max(1.0, gamma, np.linalg.norm(certificate.P, 2))

    def test_fixed_system_and_bad_gamma(self, make_system):
        """Fixed systems assemble without taps; γ must be positive."""
        sys = make_system(2)
        assert brl_lmi_assemble(sys, 1.0).realization.n_alpha == 0
        with pytest.raises(ValidationError):
            brl_lmi_assemble(sys, 0.0)

    def test_infeasible_verdict(self, make_system):
        """Below the norm the check reports infeasibility instead of raising."""
        sys = make_system(3)
        assert not brl_certificate_check(sys, 0.5 * hinf_norm(sys).gamma).feasible


class TestFirSynthesis:
    """Test the H-infinity FIR synthesis."""

    def test_perfect_match(self):
        """An FIR target within the order is matched exactly."""
        target = FirFilter(np.array([0.5, 0.25]))
        options = SynthesisOptions(max_outer=10)
        K, report = fir_hinf_synthesis(matching_plant(target.to_state_space()), 1, options)
        assert report.gamma_certified <= 1e-6
        assert np.allclose(K.coefficients, [0.5, 0.25], atol=1e-6)

    def test_delay_by_constant(self):
        """min_c ‖z⁻¹ − c‖∞ = 1 at c = 0."""
        K, report = fir_hinf_synthesis(matching_plant(delay_line(1, 1, 1.0)), 0)
        assert abs(K.coefficients[0]) <= 1e-3
        assert report.gamma_certified == pytest.approx(1.0, abs=1e-3)
        assert report.converged
        assert report.gamma_achieved <= report.gamma_certified * (1.0 + 1e-6)

    def test_polyak_solver(self):
        """The pure subgradient inner solver reaches the same optimum on a small problem."""
        options = SynthesisOptions(inner_solver=InnerSolver.POLYAK)
        _, report = fir_hinf_synthesis(matching_plant(delay_line(1, 1, 1.0)), 0, options)
        assert report.solver == InnerSolver.POLYAK.value
        assert report.gamma_certified <= 1.01

    def test_order_monotone_with_warm_start(self):
        """Raising the order from a padded warm start never certifies worse."""
        plant = matching_plant(tf_to_ss(TransferFunction([1.0, 0.0], [1.0, -0.8])))
        previous, gamma_previous = None, np.inf
        for order in (2, 4, 8):
            initial = previous.padded(order) if previous is not None else None
            K, report = fir_hinf_synthesis(plant, order, SynthesisOptions(initial=initial))
            assert report.gamma_certified <= gamma_previous * (1.0 + 2e-4)
            previous, gamma_previous = K, report.gamma_certified
        # truncation after 9 taps leaves 0.8⁹/(1 − 0.8), so the optimum is well below it
        assert gamma_previous < 0.8 ** 9 / 0.2

    def test_report_history(self):
        """Each outer pass records the relative gap between the certified norm and the grid maximum."""
        plant = matching_plant(tf_to_ss(TransferFunction([1.0, 0.0, 0.0], [1.0, -1.6, 0.95])))
        options = SynthesisOptions()
        _, report = fir_hinf_synthesis(plant, 2, options)
        history = report.gap_history
        assert report.outer_iterations >= 2
        assert len(history) == report.outer_iterations
        assert all(gap >= -2.0 * options.tol_rel for gap in history)
        assert all(gap > options.gap_rel for gap in history[:-1])
        if report.converged:
            assert history[-1] <= options.gap_rel + 1e-9
            assert history[-1] <= min(history[:-1])
        assert report.lower_bound <= report.gamma_certified * (1.0 + 1e-4)

    def test_rejects_bad_order_and_initial(self):
        """Negative orders and misshaped warm starts are rejected."""
        plant = matching_plant(delay_line(1, 1, 1.0))
        with pytest.raises(ValidationError):
            fir_hinf_synthesis(plant, -1)
        with pytest.raises(ValidationError):
            fir_hinf_synthesis(plant, 2, SynthesisOptions(initial=FirFilter(np.zeros(2))))


class TestTapFiles:
    """Test the plain-text tap format."""

    def test_round_trip(self, tmp_path):
        """Taps survive a write and read exactly."""
        fir = FirFilter(np.arange(12, dtype=float).reshape(3, 2, 2) / 7.0, dt=0.25)
        back = read_taps(write_taps(fir, tmp_path / "taps.txt", "demo"))
        assert np.array_equal(back.taps, fir.taps)
        assert back.dt == 0.25

    def test_header(self):
        """The header names dimensions and period."""
        text = format_taps(FirFilter(np.ones(3)), "x")
        assert text.splitlines()[0] == "# liftsynth taps x"
        assert "order=2 outputs=1 inputs=1" in text.splitlines()[1]

    def test_missing_header(self, tmp_path):
        """Tap files without dimensions are rejected."""
        path = tmp_path / "bad.txt"
        path.write_text("0 1.0\n1 2.0\n")
        with pytest.raises(ValidationError):
            read_taps(path)

    def test_malformed_number(self, tmp_path):
        """A tap value that is not a number is a validation error."""
        path = tmp_path / "bad.txt"
        path.write_text("# order=1 outputs=1 inputs=1 period=1\n0 1.0\n1 two\n")
        with pytest.raises(ValidationError, match="line 3"):
            read_taps(path)

    def test_malformed_header(self, tmp_path):
        """A header value that does not parse is a validation error."""
        path = tmp_path / "bad.txt"
        path.write_text("# order=1 outputs=one inputs=1 period=1\n0 1.0\n1 2.0\n")
        with pytest.raises(ValidationError, match="malformed header"):
            read_taps(path)

    def test_ragged_rows(self, tmp_path):
        """Every row carries outputs×inputs values."""
        path = tmp_path / "bad.txt"
        path.write_text("# order=1 outputs=1 inputs=2 period=1\n0 1.0 2.0\n1 3.0\n")
        with pytest.raises(ValidationError):
            read_taps(path)

    def test_missing_file(self, tmp_path):
        """An unreadable path is a validation error."""
        with pytest.raises(ValidationError, match="cannot read"):
            read_taps(tmp_path / "absent.txt")


if __name__ == "__main__":
    pytest.main([__file__, "-v"])

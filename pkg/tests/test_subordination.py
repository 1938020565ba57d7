"""
Tests for Subordination Module.

Tests transforms on the imaginary axis, the eta solver and its three
outcome states.
"""

import math

import numpy as np
import pytest

from src.ensembles import SingularLaw, quarter_circle_law
from src.geometry import InitialLaw, sigma_infinity_boundary
from src.subordination import (
    # Models
    SymmetricAtomicMeasure,
    StepKind,
    StepLaw,
    EtaState,
    EtaResult,
    SolverConfig,
    # Transforms
    NonPositiveArgumentError,
    cauchy_symmetric,
    h_transform,
    semicircle_h,
    shifted_z_measure,
    wrapped_lorentzian_sum,
    wrapped_lorentzian_sum_truncated,
    # Service
    EtaSolver,
    principal_root,
)


@pytest.fixture
def trivial():
    """Law of u0 = 1."""
    return InitialLaw.trivial()


@pytest.fixture
def solver():
    """Fresh solver with default configuration."""
    return EtaSolver()


# =============================================================================
# Model Tests
# =============================================================================

class TestStepLaw:
    """Tests for StepLaw."""

    def test_haar_summary(self):
        """Test the Haar step scalars."""
        summary = StepLaw.haar().summary
        assert summary.inv_l2_sq == pytest.approx(1.0)
        assert summary.kernel_mass == 0.0

    def test_circular_not_invertible(self):
        """Test that circular steps have infinite inverse moment."""
        assert not StepLaw.circular().summary.invertible

    def test_circular_has_no_singular_law(self):
        """Test that only atomic and Haar steps expose a singular law."""
        with pytest.raises(ValueError):
            _ = StepLaw.circular().singular_law
        assert StepLaw.haar().singular_law.atom_values.tolist() == [1.0]

    def test_atomic_requires_law(self):
        """Test validation of atomic steps."""
        assert StepLaw(kind=StepKind.ATOMIC).validation_errors()
        law = SingularLaw(values=[0.0, math.sqrt(2.0)], weights=[0.5, 0.5])
        assert StepLaw.atomic(law).validation_errors() == []
        assert StepLaw.atomic(law).summary.kernel_mass == pytest.approx(0.5)

    def test_round_trip(self):
        """Test dictionary round trip."""
        step = StepLaw.atomic(SingularLaw(values=[0.5, math.sqrt(1.75)], weights=[0.5, 0.5]))
        assert StepLaw.from_dict(step.to_dict()).to_dict() == step.to_dict()

    def test_eta_result_psi(self):
        """Test psi = i sqrt(eta) and the disk state."""
        assert EtaResult(state=EtaState.INTERIOR, eta=4.0).psi == 2j
        assert math.isinf(EtaResult(state=EtaState.DISK_INFINITE).psi.imag)

    def test_config_to_dict(self):
        """Test configuration defaults."""
        data = SolverConfig().to_dict()
        assert data["max_iterations"] == 200
        assert data["fixed_point_tolerance"] == 1e-12


# =============================================================================
# Transform Tests
# =============================================================================

class TestTransforms:
    """Tests for Cauchy and H transforms."""

    def test_cauchy_of_symmetric_bernoulli(self):
        """Test G(i) = -i/2 for the law of +-1."""
        m = SymmetricAtomicMeasure(values=[1.0], weights=[1.0])
        assert cauchy_symmetric(m, 1.0) == pytest.approx(-0.5j)

    def test_h_of_symmetric_bernoulli(self):
        """Test H(i) = 1/G(i) - i = i."""
        m = SymmetricAtomicMeasure(values=[1.0], weights=[1.0])
        assert h_transform(m, 1.0) == pytest.approx(1j)

    def test_h_at_large_argument(self):
        """Test H(iy) ~ i m2/y without cancellation at large y."""
        m = SymmetricAtomicMeasure(values=[1.0, 2.0], weights=[0.5, 0.5])
        y = 1e8
        assert h_transform(m, y).imag == pytest.approx(2.5 / y, rel=1e-9)

    def test_semicircle(self):
        """Test H of the semicircle law at iy."""
        assert semicircle_h(1.0, 1.0).imag == pytest.approx((math.sqrt(5.0) - 1.0) / 2.0)

    def test_nonpositive_argument(self):
        """Test that y <= 0 is rejected."""
        m = SymmetricAtomicMeasure(values=[1.0], weights=[1.0])
        with pytest.raises(NonPositiveArgumentError):
            h_transform(m, 0.0)

    def test_shifted_z_measure(self, trivial):
        """Test the distances from lambda to the points of Z."""
        m = shifted_z_measure(trivial, 2, 1j)
        np.testing.assert_allclose(m.atom_values, [math.sqrt(2.0), math.sqrt(2.0)])
        np.testing.assert_allclose(m.atom_weights, [0.5, 0.5])

    def test_dilate(self):
        """Test that dilation scales the atoms."""
        m = SymmetricAtomicMeasure(values=[1.0, 3.0], weights=[0.5, 0.5]).dilate(2.0)
        np.testing.assert_allclose(m.atom_values, [2.0, 6.0])


class TestWrappedLorentzian:
    """Tests for the periodized Lorentzian sum."""

    def test_closed_form_matches_truncation(self):
        """Test the closed form against a long direct sum."""
        for c_sq, phi in ((0.5, 0.7), (2.0, -2.5), (0.01, 3.0)):
            closed = float(wrapped_lorentzian_sum(c_sq, phi))
            direct = wrapped_lorentzian_sum_truncated(c_sq, phi, 100_000)
            assert closed == pytest.approx(direct, rel=1e-5)

    def test_zero_shift(self):
        """Test the c = 0 limit 1/(4 sin^2(phi/2))."""
        assert float(wrapped_lorentzian_sum(0.0, math.pi)) == pytest.approx(0.25)
        assert math.isinf(float(wrapped_lorentzian_sum(0.0, 0.0)))

    def test_vectorized(self):
        """Test array input."""
        values = wrapped_lorentzian_sum(1.0, np.array([0.1, 0.2, 0.3]))
        assert values.shape == (3,)
        assert np.all(np.diff(values) < 0.0)

    def test_negative_shift_rejected(self):
        """Test that c^2 < 0 is rejected."""
        with pytest.raises(NonPositiveArgumentError):
            wrapped_lorentzian_sum(-1.0, 0.5)


# =============================================================================
# Solver Tests
# =============================================================================

class TestPrincipalRoot:
    """Tests for principal_root."""

    def test_negative_axis(self):
        """Test that the negative axis maps to argument pi/k."""
        assert principal_root(-1.0, 2) == pytest.approx(1j)

    def test_origin(self):
        """Test the root of zero."""
        assert principal_root(0.0, 5) == 0j

    def test_power_recovers(self):
        """Test root ** k = z."""
        z = 0.3 - 2.1j
        assert principal_root(z, 7) ** 7 == pytest.approx(z)


class TestEtaSolver:
    """Tests for EtaSolver."""

    def test_circular_interior(self, solver, trivial):
        """Test eta = t/2 - 2 at lambda = i for two circular steps."""
        result = solver.solve_eta_lambda(StepLaw.circular(), trivial, 2, 6.0, 1j)
        assert result.state == EtaState.INTERIOR
        assert result.eta == pytest.approx(1.0, rel=1e-10)

    def test_circular_exterior(self, solver, trivial):
        """Test the exterior state below the boundary time."""
        result = solver.solve_eta_lambda(StepLaw.circular(), trivial, 2, 2.0, 1j)
        assert result.state == EtaState.EXTERIOR_ZERO
        assert result.eta == 0.0

    def test_haar_exterior_and_disk(self, solver, trivial):
        """Test the Haar switch from exterior to the E_2 disk at t = 4."""
        exterior = solver.solve_eta_lambda(StepLaw.haar(), trivial, 2, 3.0, 1j)
        disk = solver.solve_eta_lambda(StepLaw.haar(), trivial, 2, 5.0, 1j)
        assert exterior.state == EtaState.EXTERIOR_ZERO
        assert disk.state == EtaState.DISK_INFINITE

    def test_haar_scalar_equation_agrees(self, solver, trivial):
        """Test the generic solve against the Haar scalar equation."""
        generic = solver.solve_eta_k(StepLaw.haar(), trivial, 2, 1.0, 1.2)
        scalar = solver.eta_haar_scalar_equation(trivial, 2, 1.0, 1.2)
        assert generic.state == scalar.state == EtaState.INTERIOR
        assert generic.eta == pytest.approx(scalar.eta, rel=1e-8)

    def test_atomic_point_law_matches_haar(self, solver, trivial):
        """Test that the unit point mass behaves like a Haar step."""
        haar = solver.solve_eta_k(StepLaw.haar(), trivial, 3, 1.5, 0.9 + 0.3j)
        atomic = solver.solve_eta_k(
            StepLaw.atomic(SingularLaw.point()), trivial, 3, 1.5, 0.9 + 0.3j
        )
        assert atomic.state == haar.state
        assert atomic.eta == pytest.approx(haar.eta, rel=1e-8, abs=1e-14)

    def test_quarter_circle_atoms_match_circular(self, solver, trivial):
        """Test that a discretized quarter-circle step reproduces the circular eta."""
        circular = solver.solve_eta_lambda(StepLaw.circular(), trivial, 2, 6.0, 1j)
        atomic = solver.solve_eta_lambda(
            StepLaw.atomic(quarter_circle_law(2000)), trivial, 2, 6.0, 1j
        )
        assert atomic.state == EtaState.INTERIOR
        assert atomic.eta == pytest.approx(circular.eta, rel=2e-3)

    def test_fixed_point_residual(self, solver, trivial):
        """Test that interior solves satisfy the fixed-point equation."""
        result = solver.solve_eta_k(StepLaw.circular(), trivial, 4, 1.0, 1.1 + 0.1j)
        assert result.state == EtaState.INTERIOR
        assert result.residual <= 1e-12 * max(1.0, math.sqrt(result.eta))

    def test_denjoy_wolff_agrees(self, solver, trivial):
        """Test the raw iteration against the bracketed solve."""
        result = solver.denjoy_wolff_iterate(StepLaw.circular(), trivial, 2, 6.0, 1j)
        assert result.state == EtaState.INTERIOR
        assert result.eta == pytest.approx(1.0, rel=1e-8)

    def test_denjoy_wolff_exterior(self, solver, trivial):
        """Test that the iteration collapses to 0 outside the domain."""
        result = solver.denjoy_wolff_iterate(StepLaw.circular(), trivial, 2, 2.0, 1j)
        assert result.state == EtaState.EXTERIOR_ZERO

    def test_agrees_with_lifetime(self, solver, trivial):
        """Test that solver states match the lifetime test on a sweep."""
        for z in (1.05, 0.9 + 0.2j, -0.5, 2.0j, 1.0 + 0.6j):
            solver.solve_eta_k(StepLaw.circular(), trivial, 3, 1.0, z)
        stats = solver.get_stats()
        assert stats.total_solves == 5
        assert stats.state_disagreements == 0

    def test_stats_reset(self, solver, trivial):
        """Test that stats can be cleared."""
        solver.solve_eta_lambda(StepLaw.circular(), trivial, 2, 6.0, 1j)
        solver.reset_stats()
        assert solver.get_stats().total_solves == 0

    def test_invalid_arguments(self, solver, trivial):
        """Test that k < 1 and t <= 0 are rejected."""
        with pytest.raises(NonPositiveArgumentError):
            solver.solve_eta_lambda(StepLaw.circular(), trivial, 0, 1.0, 1j)
        with pytest.raises(NonPositiveArgumentError):
            solver.solve_eta_lambda(StepLaw.circular(), trivial, 2, 0.0, 1j)


class TestEtaInfinity:
    """Tests for the k = infinity solve."""

    def test_boundary_identity(self, solver, trivial):
        """Test rho^2 + eta_inf = log^2 r(t, theta) inside Sigma_inf."""
        t = 1.0
        for theta in (-0.6, -0.2, 0.0, 0.3, 0.7):
            outer = sigma_infinity_boundary(trivial, t, theta)
            for fraction in (-0.5, 0.0, 0.4):
                rho = fraction * math.log(outer)
                z = math.exp(rho) * complex(math.cos(theta), math.sin(theta))
                result = solver.solve_eta_infinity(trivial, t, z)
                assert result.state == EtaState.INTERIOR
                assert rho * rho + result.eta == pytest.approx(math.log(outer) ** 2, abs=1e-8)

    def test_exterior(self, solver, trivial):
        """Test the exterior state outside Sigma_inf."""
        assert solver.solve_eta_infinity(trivial, 1.0, -1.0).state == EtaState.EXTERIOR_ZERO

    def test_origin_rejected(self, solver, trivial):
        """Test that z = 0 is rejected."""
        with pytest.raises(NonPositiveArgumentError):
            solver.solve_eta_infinity(trivial, 1.0, 0.0)

    def test_scaled_finite_k_limit(self, solver, trivial):
        """Test that k^2 eta_k approaches eta_inf as k grows."""
        t, ks = 1.0, [8, 16, 32, 64]
        step = StepLaw.circular()
        for theta in (-0.5, 0.0, 0.3):
            outer = sigma_infinity_boundary(trivial, t, theta)
            for fraction in (-0.5, -0.2):
                z = math.exp(fraction * math.log(outer)) * complex(math.cos(theta), math.sin(theta))
                limit = solver.solve_eta_infinity(trivial, t, z).eta
                gaps = []
                for k in ks:
                    result = solver.solve_eta_k(step, trivial, k, t, z)
                    assert result.state == EtaState.INTERIOR
                    gaps.append(abs(k * k * result.eta - limit))
                assert gaps[-1] < gaps[0]
                assert gaps[-1] <= 0.02 * limit

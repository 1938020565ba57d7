"""
Tests for Brown Density Module.

Tests pointwise densities against closed forms, the limiting density and
polar grid construction.
"""

import math

import numpy as np
import pytest

from src.geometry import InitialLaw, PoleError, sigma_infinity_boundary
from src.subordination import StepLaw, principal_root
from src.density import (
    # Models
    MaskReason,
    DensityConfig,
    DensityGrid,
    # Closed forms
    density_k2_haar,
    density_k2_circular,
    # Service
    DensityError,
    OutsideDomainError,
    BrownDensity,
    density_infinity,
    radial_weight,
    # Grids
    RaySlice,
    domain_slices,
    interior_nodes,
    boundary_band,
    build_density_grid,
)


@pytest.fixture
def trivial():
    """Law of u0 = 1."""
    return InitialLaw.trivial()


@pytest.fixture
def service():
    """Density service with default configuration."""
    return BrownDensity()


# =============================================================================
# Model Tests
# =============================================================================

class TestDensityModels:
    """Tests for DensityConfig and DensityGrid."""

    def test_config_to_dict(self):
        """Test configuration defaults."""
        data = DensityConfig().to_dict()
        assert data["relative_step"] == 1e-4
        assert data["richardson"] is True
        assert data["pole_radius"] == 1e-3

    def test_default_reasons(self):
        """Test that reasons default to unmasked."""
        grid = DensityGrid(
            k=2,
            t=1.0,
            r=np.array([1.0, 2.0]),
            theta=np.array([0.0, 0.0]),
            area=np.array([0.5, 0.5]),
            values=np.array([1.0, 1.0]),
            masked=np.array([False, False]),
        )
        assert grid.reasons == [MaskReason.NONE.value, MaskReason.NONE.value]
        assert grid.mass == pytest.approx(1.0)

    def test_masked_cells_excluded(self):
        """Test that masked cells add nothing to the mass."""
        grid = DensityGrid(
            k=2,
            t=1.0,
            r=np.array([1.0, 2.0]),
            theta=np.array([0.0, 0.0]),
            area=np.array([0.5, 0.25]),
            values=np.array([1.0, 3.0]),
            masked=np.array([False, True]),
            reasons=["", "stencil"],
        )
        assert grid.mass == pytest.approx(0.5)
        assert grid.masked_count == 1
        assert grid.masked_area == pytest.approx(0.25)
        assert grid.masked_fraction == pytest.approx(0.5)


# =============================================================================
# Pointwise Density Tests
# =============================================================================

class TestClosedForms:
    """Tests for the k = 2 closed forms."""

    def test_circular_value(self):
        """Test the circular density at t = 2, z = 1."""
        expected = (1.0 - 1.0 / 8.0 + 2.0 / (8.0 * math.sqrt(68.0))) / (2.0 * math.pi)
        assert density_k2_circular(2.0, 1.0) == pytest.approx(expected, rel=1e-12)
        assert expected == pytest.approx(0.144087, abs=1e-6)

    def test_negative_axis_is_a_pole(self):
        """Test that both forms refuse the closed negative real axis."""
        with pytest.raises(PoleError):
            density_k2_circular(1.0, -0.5)
        with pytest.raises(PoleError):
            density_k2_haar(3.0, -1.0)

    def test_conjugation_symmetry(self):
        """Test rho(z) = rho(conj z) for the trivial initial law."""
        z = 1.1 + 0.4j
        assert density_k2_haar(3.0, z) == pytest.approx(density_k2_haar(3.0, z.conjugate()))


class TestBrownDensity:
    """Tests for BrownDensity."""

    def test_circular_k2_matches_closed_form(self, service, trivial):
        """Test the generic pipeline against the circular closed form."""
        step = StepLaw.circular()
        nodes = interior_nodes(trivial, 2, 2.0, n_r=3, n_theta=4, margin=0.2, step=step)
        assert nodes
        for z in nodes:
            generic = service.density_k(step, trivial, 2, 2.0, z)
            assert generic == pytest.approx(density_k2_circular(2.0, z), abs=1e-5)

    def test_haar_k2_matches_closed_form(self, service, trivial):
        """Test the generic pipeline against the Haar closed form."""
        step = StepLaw.haar()
        nodes = interior_nodes(trivial, 2, 3.0, n_r=3, n_theta=4, margin=0.2, step=step)
        assert nodes
        for z in nodes:
            generic = service.density_k(step, trivial, 2, 3.0, z)
            assert generic == pytest.approx(density_k2_haar(3.0, z), abs=1e-5)

    def test_linearized_relation(self, service, trivial):
        """Test rho_lin(lambda) = k |lambda|^{2k-2} rho_k(lambda^k) at k = 2."""
        step = StepLaw.circular()
        z = interior_nodes(trivial, 2, 2.0, n_r=1, n_theta=2, margin=0.3, step=step)[0]
        lam = principal_root(z, 2)
        linearized = service.density_linearized(step, trivial, 2, 2.0, lam)
        expected = 2.0 * abs(lam) ** 2 * density_k2_circular(2.0, z)
        assert linearized == pytest.approx(expected, rel=1e-4)

    def test_circular_k1_is_uniform(self, service, trivial):
        """Test that 1 + sqrt(t) c has density 1/(pi t) on its disk."""
        step = StepLaw.circular()
        for z in (1.2, 0.8 + 0.3j, 1.0 - 0.5j):
            assert service.density_k(step, trivial, 1, 1.0, z) == pytest.approx(
                1.0 / math.pi, rel=1e-4
            )

    def test_pole_disk_rejected(self, service, trivial):
        """Test that points near z = 0 are refused for k > 1."""
        with pytest.raises(OutsideDomainError):
            service.density_k(StepLaw.circular(), trivial, 2, 1.0, 1e-4)

    def test_exclusion_disk_rejected(self, service, trivial):
        """Test that points inside the Haar exclusion disk are refused."""
        with pytest.raises(OutsideDomainError):
            service.density_k(StepLaw.haar(), trivial, 2, 3.0, 0.2)

    def test_exterior_rejected(self, service, trivial):
        """Test that exterior points raise."""
        with pytest.raises(OutsideDomainError):
            service.density_k(StepLaw.circular(), trivial, 2, 1.0, 5.0)


class TestDensityInfinity:
    """Tests for the limiting density."""

    def test_inverse_square_profile(self, trivial):
        """Test rho_inf(r1 e^{i theta}) / rho_inf(r2 e^{i theta}) = (r2/r1)^2."""
        t, theta = 2.0, 0.1
        outer = sigma_infinity_boundary(trivial, t, theta)
        unit = complex(math.cos(theta), math.sin(theta))
        r1, r2 = outer**0.25, outer**0.5
        ratio = density_infinity(trivial, t, r1 * unit) / density_infinity(trivial, t, r2 * unit)
        assert ratio == pytest.approx((r2 / r1) ** 2, rel=1e-12)

    def test_radial_weight_positive(self, trivial):
        """Test that the radial weight is positive inside the angular range."""
        assert radial_weight(trivial, 1.0, 0.0) > 0.0

    def test_outside_angular_range(self, trivial):
        """Test that angles beyond the range raise."""
        with pytest.raises(OutsideDomainError):
            radial_weight(trivial, 1.0, math.pi)

    def test_outside_annulus(self, trivial):
        """Test points outside Sigma_inf and the origin."""
        outer = sigma_infinity_boundary(trivial, 1.0, 0.0)
        with pytest.raises(OutsideDomainError):
            density_infinity(trivial, 1.0, 1.5 * outer)
        with pytest.raises(OutsideDomainError):
            density_infinity(trivial, 1.0, 0.0)


# =============================================================================
# Grid Tests
# =============================================================================

class TestGrids:
    """Tests for slices, interior nodes and density grids."""

    def test_domain_slices(self, trivial):
        """Test that slices are ordered and non-empty."""
        slices, d_theta = domain_slices(trivial, 2, 1.0, 16, StepLaw.circular())
        assert 0 < len(slices) <= 16
        assert d_theta > 0.0
        assert all(ray.outer > ray.inner >= 0.0 for ray in slices)
        assert all(a.theta < b.theta for a, b in zip(slices, slices[1:]))

    def test_interior_node_count(self, trivial):
        """Test n_r nodes per slice."""
        slices, _ = domain_slices(trivial, 3, 1.0, 6, StepLaw.circular())
        nodes = interior_nodes(trivial, 3, 1.0, 5, 6, step=StepLaw.circular())
        assert len(nodes) == 5 * len(slices)

    def test_minimum_resolution(self, trivial):
        """Test that resolutions below 16 are rejected."""
        with pytest.raises(DensityError):
            build_density_grid(StepLaw.circular(), trivial, 2, 1.0, 8)

    def test_time_must_be_positive(self, trivial):
        """Test that t = 0 is rejected."""
        with pytest.raises(DensityError):
            build_density_grid(StepLaw.circular(), trivial, 2, 0.0, 16)

    def test_infinity_grid_mass(self, trivial):
        """Test that the limiting density integrates to about 1."""
        grid = build_density_grid(StepLaw.circular(), trivial, None, 1.0, 64, threads=1)
        assert grid.k is None
        assert grid.mass == pytest.approx(1.0, abs=0.03)

    def test_k2_grid_mass(self, trivial):
        """Test that a k = 2 circular grid integrates to about 1."""
        grid = build_density_grid(StepLaw.circular(), trivial, 2, 1.0, 32, threads=2)
        assert grid.mass == pytest.approx(1.0, abs=0.05)
        assert grid.masked_count == sum(1 for reason in grid.reasons if reason)
        assert set(grid.reasons) <= {reason.value for reason in MaskReason}

    def test_sector_masses_normalized(self, trivial):
        """Test that sector masses sum to 1."""
        grid = build_density_grid(StepLaw.circular(), trivial, None, 1.0, 16, threads=1)
        radial_edges = np.linspace(0.0, float(grid.r.max()) * 1.001, 5)
        angular_edges = np.linspace(-math.pi, math.pi, 5)
        assert grid.sector_masses(radial_edges, angular_edges).sum() == pytest.approx(1.0)

    def test_radial_marginal_normalized(self, trivial):
        """Test that the radial marginal is a probability vector."""
        grid = build_density_grid(StepLaw.circular(), trivial, None, 1.0, 16, threads=1)
        radii, probabilities = grid.radial_marginal()
        assert len(radii) == len(probabilities)
        assert probabilities.sum() == pytest.approx(1.0)

    def test_from_polar_cells_recovers_area(self, trivial):
        """Test that open-cell areas are rebuilt from centers alone."""
        grid = build_density_grid(StepLaw.circular(), trivial, None, 1.0, 16, threads=1)
        rebuilt = DensityGrid.from_polar_cells(
            grid.k, grid.t, grid.r, grid.theta, grid.values, grid.masked
        )
        keep = ~grid.masked
        np.testing.assert_allclose(rebuilt.area[keep], grid.area[keep], rtol=1e-9)
        assert rebuilt.mass == pytest.approx(grid.mass, rel=1e-9)

    @pytest.mark.parametrize(
        "step, k, t",
        [
            (StepLaw.haar(), 2, 1.0),
            (StepLaw.circular(), 3, 2.0),
            (StepLaw.circular(), 6, 1.0),
        ],
        ids=["haar-k2-t1", "circular-k3-t2", "circular-k6-t1"],
    )
    def test_acceptance_masses(self, trivial, step, k, t):
        """Test that unmasked mass is 1 within 2% at resolution 32."""
        grid = build_density_grid(step, trivial, k, t, 32, threads=2)
        assert grid.mass == pytest.approx(1.0, abs=0.02)


class TestBoundaryBand:
    """Tests for the masked band along the slice ends."""

    def test_band_is_masked(self, trivial, service):
        """Test that every slice ends in two masked cells within 2h of its ends."""
        step = StepLaw.circular()
        slices, _ = domain_slices(trivial, 2, 1.0, 16, step)
        grid = build_density_grid(step, trivial, 2, 1.0, 16, service=service, threads=1)
        assert grid.size == 18 * len(slices)
        assert grid.masked_area > 0.0
        assert grid.band_area > 0.0
        band = [i for i, reason in enumerate(grid.reasons) if reason == MaskReason.BOUNDARY.value]
        assert len(band) == 2 * len(slices)
        for index, ray in enumerate(slices):
            h = service.config.relative_step * (1.0 + ray.outer)
            first, last = index * 18, index * 18 + 17
            assert first in band and last in band
            assert grid.r[first] - ray.inner <= 2.0 * h
            assert ray.outer - grid.r[last] <= 2.0 * h
            assert grid.theta[first] == ray.theta

    def test_band_width(self, trivial, service):
        """Test that the band is 2h wide and capped at a quarter slice."""
        slices, _ = domain_slices(trivial, 3, 2.0, 16, StepLaw.circular())
        ray = slices[len(slices) // 2]
        h = service.config.relative_step * (1.0 + ray.outer)
        assert boundary_band(ray, service) == pytest.approx(2.0 * h)
        thin = RaySlice(theta=0.0, inner=1.0, outer=1.0 + 1e-5)
        assert boundary_band(thin, service) == pytest.approx(0.25e-5)

    def test_band_mass_is_small(self, trivial):
        """Test that the band area is a small share of the grid area."""
        grid = build_density_grid(StepLaw.circular(), trivial, None, 1.0, 32, threads=1)
        assert 0.0 < grid.band_area < 1e-2 * float(np.sum(grid.area))
        assert grid.mass == pytest.approx(1.0, abs=0.03)

    def test_masked_fraction_decreases(self, trivial):
        """Test that the band's share of cells shrinks as the resolution doubles."""

        def band_fraction(grid):
            return grid.reasons.count(MaskReason.BOUNDARY.value) / grid.size

        coarse = build_density_grid(StepLaw.circular(), trivial, None, 1.0, 16, threads=1)
        fine = build_density_grid(StepLaw.circular(), trivial, None, 1.0, 32, threads=1)
        assert band_fraction(coarse) == pytest.approx(2.0 / 18.0)
        assert band_fraction(fine) == pytest.approx(2.0 / 34.0)

"""
Brown Density Module.

Provides Brown-measure densities of the walk and its limit including:
- rho_k(t, z) from the subordination solve by Wirtinger differentiation
- Closed-form k = 2 densities for Haar and circular steps
- The limiting density rho_inf = w_t(theta)/r^2
- Slice-adapted polar grids with integrated mass and mask reasons

Usage:
    from src.density import build_density_grid, density_k
    from src.geometry import InitialLaw
    from src.subordination import StepLaw

    value = density_k(StepLaw.circular(), InitialLaw.trivial(), k=2, t=2.0, z=complex(1.0, 0.2))
    grid = build_density_grid(StepLaw.circular(), InitialLaw.trivial(), k=6, t=1.0, resolution=64)
    print(grid.mass)
"""

from src.density.models import (
    MaskReason,
    DensityConfig,
    DensityGrid,
)

from src.density.closed_forms import (
    density_k2_haar,
    density_k2_circular,
)

from src.density.service import (
    DensityError,
    StencilEscapeError,
    OutsideDomainError,
    BrownDensity,
    cauchy_field,
    get_density_service,
    set_density_service,
    density_k,
    density_linearized,
    density_infinity,
    radial_weight,
)

from src.density.grid import (
    MIN_RESOLUTION,
    RaySlice,
    domain_slices,
    interior_nodes,
    boundary_band,
    build_density_grid,
)

__all__ = [
    # Models
    "MaskReason",
    "DensityConfig",
    "DensityGrid",
    # Closed forms
    "density_k2_haar",
    "density_k2_circular",
    # Service
    "DensityError",
    "StencilEscapeError",
    "OutsideDomainError",
    "BrownDensity",
    "cauchy_field",
    "get_density_service",
    "set_density_service",
    "density_k",
    "density_linearized",
    "density_infinity",
    "radial_weight",
    # Grids
    "MIN_RESOLUTION",
    "RaySlice",
    "domain_slices",
    "interior_nodes",
    "boundary_band",
    "build_density_grid",
]

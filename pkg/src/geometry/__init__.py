"""
Lifetime Geometry Module.

Provides the support geometry of the walk's Brown measure including:
- Lifetime functions T_k and T_inf with their analytic continuations
- Lifetime minimizers, collision times and boundary radii per angle
- Exclusion disk D_k(a, t), atom candidates S_k and the E_{2,k} disk
- Topological phase classification by time
- Boundary point clouds and Hausdorff distances between domains

Usage:
    from src.geometry import InitialLaw, StepLawSummary, boundary_radii, classify_phase

    law = InitialLaw.trivial()
    slice_ = boundary_radii(law, k=6, t=1.0, theta=0.0)
    phase = classify_phase(k=3, t=2.0, summary=StepLawSummary.haar())
"""

from src.geometry.models import (
    InitialLaw,
    StepLawSummary,
    DomainSlice,
    PhaseRegime,
    PhaseClassification,
    wrap_angle,
)

from src.geometry.lifetime import (
    GeometryError,
    PoleError,
    BracketError,
    kernel_sum,
    lifetime_k,
    lifetime_infinity,
    lifetime_k_polar,
    lifetime_k_dr,
    roots_sum_closed_form,
    roots_sum_direct,
)

from src.geometry.domain import (
    r_min,
    boundary_radii,
    sigma_k_contains,
    sigma_infinity_contains,
    omega_k_contains,
    d_k_disk,
    e2_contains,
    critical_time,
    classify_phase,
    s_k_atoms,
    angular_interval,
    sigma_infinity_boundary,
    dilated_support_contains,
    boundary_points,
    hausdorff_distance,
)

__all__ = [
    # Models
    "InitialLaw",
    "StepLawSummary",
    "DomainSlice",
    "PhaseRegime",
    "PhaseClassification",
    "wrap_angle",
    # Lifetimes
    "GeometryError",
    "PoleError",
    "BracketError",
    "kernel_sum",
    "lifetime_k",
    "lifetime_infinity",
    "lifetime_k_polar",
    "lifetime_k_dr",
    "roots_sum_closed_form",
    "roots_sum_direct",
    # Domains
    "r_min",
    "boundary_radii",
    "sigma_k_contains",
    "sigma_infinity_contains",
    "omega_k_contains",
    "d_k_disk",
    "e2_contains",
    "critical_time",
    "classify_phase",
    "s_k_atoms",
    "angular_interval",
    "sigma_infinity_boundary",
    "dilated_support_contains",
    "boundary_points",
    "hausdorff_distance",
]

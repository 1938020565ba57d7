"""
Brown Density Service.

Provides pointwise Brown-measure densities including:
- rho_k(t, z) of u0 b_k(t) through the subordinated Cauchy field
- The linearized-plane density over Omega_k(t)
- The limiting density rho_inf(t, z) = w_t(theta)/r^2 and its radial weight
"""

import cmath
import math
from typing import Callable, Optional

import numpy as np
import structlog

from src.geometry import (
    InitialLaw,
    angular_interval,
    d_k_disk,
    sigma_infinity_boundary,
)
from src.subordination import (
    EtaSolver,
    EtaState,
    StepLaw,
    get_solver,
    principal_root,
)

from .models import DensityConfig


logger = structlog.get_logger()


class DensityError(Exception):
    """Base density error."""
    pass


class StencilEscapeError(DensityError):
    """A finite-difference stencil point left the open domain."""
    pass


class OutsideDomainError(DensityError):
    """Evaluation point is outside the open support domain."""
    pass


def cauchy_field(law: InitialLaw, k: int, lam: complex, eta: float) -> complex:
    """
    Regularized Cauchy field (1/k) sum_{i,j} w_i conj(lam - zeta_ij)/(|lam - zeta_ij|^2 + eta).

    zeta_ij = e^{i(2 pi j + theta_i)/k}.
    """
    points, weights = law.root_points(k)
    offsets = complex(lam) - points
    return complex(np.sum(weights * np.conj(offsets) / (np.abs(offsets) ** 2 + eta)))


def _richardson(derivative: Callable[[float], complex], h: float, enabled: bool) -> complex:
    coarse = derivative(h)
    if not enabled:
        return coarse
    fine = derivative(0.5 * h)
    return (4.0 * fine - coarse) / 3.0


class BrownDensity:
    """
    Pointwise evaluator of Brown-measure densities.

    Features:
    - Wirtinger derivative by central differences with Richardson extrapolation
    - One retry with a halved step when a stencil point escapes the domain
    - Clipping of tiny negative values with a warning
    """

    def __init__(
        self,
        config: Optional[DensityConfig] = None,
        solver: Optional[EtaSolver] = None,
    ):
        self.config = config or DensityConfig()
        self._solver = solver

    @property
    def solver(self) -> EtaSolver:
        """Eta solver in use (the global one unless injected)."""
        return self._solver or get_solver()

    def _eta(self, step: StepLaw, law: InitialLaw, k: int, t: float, lam: complex) -> float:
        result = self.solver.solve_eta_lambda(step, law, k, t, lam)
        if result.state != EtaState.INTERIOR:
            raise StencilEscapeError(f"Stencil point {lam!r} is {result.state.value}")
        return result.eta

    def _wirtinger(
        self,
        step: StepLaw,
        law: InitialLaw,
        k: int,
        t: float,
        lam: complex,
        h: float,
    ) -> complex:
        def field_at(point: complex) -> complex:
            return cauchy_field(law, k, point, self._eta(step, law, k, t, point))

        def derivative(step_size: float) -> complex:
            dx = (field_at(lam + step_size) - field_at(lam - step_size)) / (2.0 * step_size)
            up = field_at(lam + 1j * step_size)
            down = field_at(lam - 1j * step_size)
            dy = (up - down) / (2.0 * step_size)
            return 0.5 * (dx + 1j * dy)

        return _richardson(derivative, h, self.config.richardson)

    def _finalize(self, value: float, residue: float, where: complex) -> float:
        if abs(residue) > self.config.imaginary_residue_tolerance * max(1.0, abs(value)):
            logger.warning("density_imaginary_residue", point=str(where), residue=residue)
        if value < 0.0:
            if value < -self.config.negative_tolerance:
                logger.warning("density_negative", point=str(where), value=value)
            return 0.0
        return value

    def density_linearized(
        self,
        step: StepLaw,
        law: InitialLaw,
        k: int,
        t: float,
        lam: complex,
    ) -> float:
        """
        Brown density of Z + sqrt(t/k) A at lambda.

        Equals k |lambda|^{2k-2} rho_k(t, lambda^k).

        Raises:
            OutsideDomainError: lambda is not an interior point.
            StencilEscapeError: The stencil left the domain twice.
        """
        lam = complex(lam)
        center = self.solver.solve_eta_lambda(step, law, k, t, lam)
        if center.state != EtaState.INTERIOR:
            raise OutsideDomainError(f"{lam!r} is {center.state.value} at k={k}, t={t}")

        h = self.config.relative_step * (1.0 + abs(lam))
        try:
            derivative = self._wirtinger(step, law, k, t, lam, h)
        except StencilEscapeError:
            logger.debug("density_stencil_shrunk", lam=str(lam), h=h)
            derivative = self._wirtinger(step, law, k, t, lam, 0.5 * h)
        return self._finalize(derivative.real / math.pi, derivative.imag / math.pi, lam)

    def density_k(
        self,
        step: StepLaw,
        law: InitialLaw,
        k: int,
        t: float,
        z: complex,
    ) -> float:
        """
        Brown density rho_k(t, z) of u0 b_k(t).

        Raises:
            OutsideDomainError: z is outside the domain or inside the pole disk.
        """
        z = complex(z)
        if k > 1 and abs(z) <= self.config.pole_radius:
            raise OutsideDomainError(f"{z!r} lies in the excluded disk around the pole at 0")
        radius = d_k_disk(k, t, step.summary)
        if radius is not None and abs(z) <= radius:
            raise OutsideDomainError(f"{z!r} lies in the exclusion disk of radius {radius}")
        lam = principal_root(z, k)
        linearized = self.density_linearized(step, law, k, t, lam)
        return linearized / (k * abs(z) ** (2.0 - 2.0 / k))

    def _boundary_radius(self, law: InitialLaw, t: float, theta: float) -> float:
        radius = sigma_infinity_boundary(law, t, theta)
        if radius <= 1.0:
            raise OutsideDomainError(f"Angle {theta} is outside the angular range at t={t}")
        return radius

    def _angular_profile(self, law: InitialLaw, t: float, theta: float) -> float:
        radius = self._boundary_radius(law, t, theta)
        phases = theta - law.atom_angles
        chord = radius * radius + 1.0 - 2.0 * radius * np.cos(phases)
        terms = 2.0 * radius * np.sin(phases) / chord
        return float(np.sum(law.atom_weights * terms))

    def radial_weight(self, law: InitialLaw, t: float, theta: float) -> float:
        """
        Radial weight w_t(theta) with rho_inf(t, r e^{i theta}) = w_t(theta)/r^2.

        Raises:
            OutsideDomainError: theta lies outside the angular range of Sigma_inf.
        """
        if law.is_trivial and abs(theta) >= angular_interval(law, None, t):
            raise OutsideDomainError(f"Angle {theta} is outside I_inf({t})")
        self._boundary_radius(law, t, theta)

        def derivative(step_size: float) -> complex:
            forward = self._angular_profile(law, t, theta + step_size)
            backward = self._angular_profile(law, t, theta - step_size)
            return complex((forward - backward) / (2.0 * step_size))

        try:
            slope = _richardson(derivative, self.config.theta_step, self.config.richardson).real
        except OutsideDomainError as e:
            raise StencilEscapeError(f"Angular stencil at {theta} left the domain") from e
        return (2.0 / t + slope) / (4.0 * math.pi)

    def density_infinity(self, law: InitialLaw, t: float, z: complex) -> float:
        """
        Limiting density rho_inf(t, z) of u0 b(t).

        Raises:
            OutsideDomainError: z is not in Sigma_inf(u0, t).
        """
        z = complex(z)
        if z == 0:
            raise OutsideDomainError("z = 0 is outside Sigma_inf")
        theta = cmath.phase(z)
        r = abs(z)
        radius = self._boundary_radius(law, t, theta)
        if not (1.0 / radius < r < radius):
            raise OutsideDomainError(f"{z!r} is outside Sigma_inf at t={t}")
        return self.radial_weight(law, t, theta) / (r * r)


# Global density service
_density: Optional[BrownDensity] = None


def get_density_service() -> BrownDensity:
    """Get the global density service."""
    global _density
    if _density is None:
        _density = BrownDensity()
    return _density


def set_density_service(service: Optional[BrownDensity]) -> None:
    """Replace (or clear) the global density service."""
    global _density
    _density = service


def density_k(step: StepLaw, law: InitialLaw, k: int, t: float, z: complex) -> float:
    """rho_k(t, z) with the global density service."""
    return get_density_service().density_k(step, law, k, t, z)


def density_linearized(step: StepLaw, law: InitialLaw, k: int, t: float, lam: complex) -> float:
    """Linearized-plane density with the global density service."""
    return get_density_service().density_linearized(step, law, k, t, lam)


def density_infinity(law: InitialLaw, t: float, z: complex) -> float:
    """rho_inf(t, z) with the global density service."""
    return get_density_service().density_infinity(law, t, z)


def radial_weight(law: InitialLaw, t: float, theta: float) -> float:
    """w_t(theta) with the global density service."""
    return get_density_service().radial_weight(law, t, theta)

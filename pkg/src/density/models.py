"""
Density Models.

Provides data models for Brown-measure densities including:
- Differentiation configuration
- Mask reason codes
- Slice-adapted polar density grids with integrated mass
"""

from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict, List, Optional, Tuple

import numpy as np
import numpy.typing as npt


class MaskReason(str, Enum):
    """Why a grid cell carries no density value."""
    NONE = ""
    POLE = "pole"  # Inside the excluded disk around z = 0
    STENCIL = "stencil"  # Differentiation stencil left the domain
    EXTERIOR = "exterior"  # Center point not in the open domain
    SOLVER = "solver"  # eta solve failed
    BOUNDARY = "boundary"  # Band of width 2h along the slice ends


@dataclass
class DensityConfig:
    """Finite-difference configuration for density evaluation."""
    relative_step: float = 1e-4  # h = relative_step * (1 + |lambda|)
    richardson: bool = True
    theta_step: float = 1e-4
    pole_radius: float = 1e-3
    imaginary_residue_tolerance: float = 1e-6
    negative_tolerance: float = 1e-9

    def to_dict(self) -> Dict[str, Any]:
        """Convert to dictionary."""
        return {
            "relative_step": self.relative_step,
            "richardson": self.richardson,
            "theta_step": self.theta_step,
            "pole_radius": self.pole_radius,
            "imaginary_residue_tolerance": self.imaginary_residue_tolerance,
            "negative_tolerance": self.negative_tolerance,
        }


@dataclass
class DensityGrid:
    """
    Polar grid of Brown-measure density values.

    Cells are stored flat: cell i sits at r[i] e^{i theta[i]} and covers
    area[i]. Masked cells carry density 0 and a reason code.
    """
    k: Optional[int]  # None for k = infinity
    t: float
    r: npt.NDArray[np.float64]
    theta: npt.NDArray[np.float64]
    area: npt.NDArray[np.float64]
    values: npt.NDArray[np.float64]
    masked: npt.NDArray[np.bool_]
    reasons: List[str] = field(default_factory=list)

    def __post_init__(self) -> None:
        if not self.reasons:
            self.reasons = [MaskReason.NONE.value] * len(self.r)

    @property
    def size(self) -> int:
        """Number of cells."""
        return int(len(self.r))

    @property
    def z(self) -> npt.NDArray[np.complex128]:
        """Cell centers as complex numbers."""
        return self.r * np.exp(1j * self.theta)

    @property
    def mass(self) -> float:
        """Midpoint quadrature of the density over unmasked cells."""
        return float(np.sum(self.values[~self.masked] * self.area[~self.masked]))

    @property
    def masked_area(self) -> float:
        """Total area of masked cells."""
        return float(np.sum(self.area[self.masked]))

    @property
    def band_area(self) -> float:
        """Area of the masked boundary band."""
        band = np.asarray([reason == MaskReason.BOUNDARY.value for reason in self.reasons])
        return float(np.sum(self.area[band])) if len(band) else 0.0

    @property
    def masked_count(self) -> int:
        """Number of masked cells."""
        return int(np.count_nonzero(self.masked))

    @property
    def masked_fraction(self) -> float:
        """Fraction of cells that are masked."""
        return self.masked_count / self.size if self.size else 0.0

    def radial_marginal(self) -> Tuple[npt.NDArray[np.float64], npt.NDArray[np.float64]]:
        """
        Radial marginal as weighted samples.

        Returns:
            (radii, probabilities) over unmasked cells, probabilities summing to 1.
        """
        keep = ~self.masked
        weights = self.values[keep] * self.area[keep]
        total = float(np.sum(weights))
        if total <= 0.0:
            return self.r[keep], weights
        return self.r[keep], weights / total

    def sector_masses(
        self,
        radial_edges: npt.NDArray[np.float64],
        angular_edges: npt.NDArray[np.float64],
    ) -> npt.NDArray[np.float64]:
        """Integrated density per polar sector, normalized to the grid mass."""
        keep = ~self.masked
        masses, _, _ = np.histogram2d(
            self.r[keep],
            self.theta[keep],
            bins=[radial_edges, angular_edges],
            weights=self.values[keep] * self.area[keep],
        )
        total = float(np.sum(masses))
        return masses / total if total > 0.0 else masses

    def summary(self) -> Dict[str, Any]:
        """Scalar diagnostics."""
        return {
            "k": self.k,
            "t": self.t,
            "cells": self.size,
            "mass": self.mass,
            "masked_cells": self.masked_count,
            "masked_fraction": self.masked_fraction,
            "masked_area": self.masked_area,
            "band_area": self.band_area,
        }

    @classmethod
    def from_polar_cells(
        cls,
        k: Optional[int],
        t: float,
        r: npt.NDArray[np.float64],
        theta: npt.NDArray[np.float64],
        values: npt.NDArray[np.float64],
        masked: npt.NDArray[np.bool_],
    ) -> "DensityGrid":
        """
        Rebuild a grid from cell centers, recovering areas from the spacing.

        Angles are equally spaced; each ray carries equally spaced radii
        between two thin boundary cells. The radial spacing is the median
        gap, so only the boundary cells get an approximate area.
        """
        angles = np.unique(theta)
        d_theta = float(np.min(np.diff(angles))) if len(angles) > 1 else 2.0 * np.pi
        area = np.zeros_like(r)
        for angle in angles:
            ray = np.flatnonzero(theta == angle)
            radii = r[ray]
            d_r = float(np.median(np.diff(np.sort(radii)))) if len(ray) > 1 else 0.0
            area[ray] = radii * d_r * d_theta
        return cls(
            k=k,
            t=t,
            r=r,
            theta=theta,
            area=area,
            values=values,
            masked=masked,
        )

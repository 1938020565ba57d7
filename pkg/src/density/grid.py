"""
Density Grids.

Builds slice-adapted polar grids over the support domain:
- Mid-point angles over the angular range of the domain
- Mid-point radii between the inner and outer boundary of each slice,
  outside the exclusion disk
- A masked band of width 2h at both ends of every slice
- Parallel cell evaluation with per-cell mask reasons
"""

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import List, Optional, Tuple

import numpy as np
import numpy.typing as npt
import structlog

from src.geometry import (
    InitialLaw,
    angular_interval,
    boundary_radii,
    d_k_disk,
    sigma_infinity_boundary,
)
from src.settings import get_settings
from src.subordination import StepLaw, SubordinationError

from .models import DensityGrid, MaskReason
from .service import (
    BrownDensity,
    DensityError,
    OutsideDomainError,
    StencilEscapeError,
    get_density_service,
)


logger = structlog.get_logger()

MIN_RESOLUTION = 16


@dataclass
class RaySlice:
    """Radial extent of the domain along one angle."""
    theta: float
    inner: float
    outer: float


def _angles(
    law: InitialLaw,
    k: Optional[int],
    t: float,
    n_theta: int,
) -> Tuple[npt.NDArray[np.float64], float]:
    half = angular_interval(law, k, t) if law.is_trivial else math.pi
    d_theta = 2.0 * half / n_theta
    return -half + (np.arange(n_theta) + 0.5) * d_theta, d_theta


def domain_slices(
    law: InitialLaw,
    k: Optional[int],
    t: float,
    n_theta: int,
    step: Optional[StepLaw] = None,
) -> Tuple[List[RaySlice], float]:
    """
    Radial extent of the support along mid-point angles.

    Args:
        law: Initial spectral law.
        k: Step count, or None for k = infinity.
        t: Time.
        n_theta: Number of angles.
        step: Step law, used for the exclusion disk.

    Returns:
        (slices, angular spacing); angles where the domain is empty are skipped.
    """
    thetas, d_theta = _angles(law, k, t, n_theta)
    disk = d_k_disk(k, t, step.summary) if (k is not None and step is not None) else None
    slices: List[RaySlice] = []
    for theta in thetas:
        if k is None:
            outer = sigma_infinity_boundary(law, t, float(theta))
            if outer <= 1.0:
                continue
            slices.append(RaySlice(theta=float(theta), inner=1.0 / outer, outer=outer))
            continue
        slice_ = boundary_radii(law, k, t, float(theta))
        if slice_.degenerate_at(t):
            continue
        inner = max(slice_.r_minus, disk or 0.0)
        if slice_.r_plus > inner:
            slices.append(RaySlice(theta=float(theta), inner=inner, outer=slice_.r_plus))
    return slices, d_theta


def interior_nodes(
    law: InitialLaw,
    k: Optional[int],
    t: float,
    n_r: int,
    n_theta: int,
    margin: float = 0.1,
    step: Optional[StepLaw] = None,
) -> List[complex]:
    """
    Compact interior grid: each slice shrunk by a relative margin at both ends.

    Used for pointwise oracle comparisons that must stay off the boundary.
    """
    slices, _ = domain_slices(law, k, t, n_theta, step)
    nodes: List[complex] = []
    for ray in slices:
        span = ray.outer - ray.inner
        lo = ray.inner + margin * span
        hi = ray.outer - margin * span
        radii = lo + (np.arange(n_r) + 0.5) * (hi - lo) / n_r
        unit = complex(np.exp(1j * ray.theta))
        nodes.extend(complex(r * unit) for r in radii)
    return nodes


def boundary_band(ray: RaySlice, service: BrownDensity) -> float:
    """
    Width 2h of the masked band at each end of a slice.

    h is the differentiation step at the outer end of the slice. The band
    never takes more than a quarter of the slice.
    """
    h = service.config.relative_step * (1.0 + ray.outer)
    return min(2.0 * h, 0.25 * (ray.outer - ray.inner))


def _ray_cells(
    ray: RaySlice,
    resolution: int,
    band: float,
) -> Tuple[List[float], List[float], List[bool]]:
    """Cell centers, radial widths and band flags along one slice."""
    lo, hi = ray.inner + band, ray.outer - band
    d_r = (hi - lo) / resolution
    radii = [ray.inner + 0.5 * band]
    radii.extend(lo + (i + 0.5) * d_r for i in range(resolution))
    radii.append(ray.outer - 0.5 * band)
    widths = [band] + [d_r] * resolution + [band]
    edges = [True] + [False] * resolution + [True]
    return radii, widths, edges


def _evaluate_cell(
    service: BrownDensity,
    step: StepLaw,
    law: InitialLaw,
    k: int,
    t: float,
    z: complex,
) -> Tuple[float, MaskReason]:
    if k > 1 and abs(z) <= service.config.pole_radius:
        return 0.0, MaskReason.POLE
    try:
        return service.density_k(step, law, k, t, z), MaskReason.NONE
    except StencilEscapeError:
        return 0.0, MaskReason.STENCIL
    except OutsideDomainError:
        return 0.0, MaskReason.EXTERIOR
    except SubordinationError:
        return 0.0, MaskReason.SOLVER


def build_density_grid(
    step: StepLaw,
    law: InitialLaw,
    k: Optional[int],
    t: float,
    resolution: int,
    service: Optional[BrownDensity] = None,
    threads: Optional[int] = None,
) -> DensityGrid:
    """
    Evaluate the Brown density on a slice-adapted polar grid.

    Args:
        step: Step law (ignored for k = infinity).
        law: Initial spectral law.
        k: Step count, or None for the k = infinity density.
        t: Time, > 0.
        resolution: Angles and radii per slice, >= 16.
        service: Density evaluator (global one by default).
        threads: Worker threads (settings.threads by default).

    Returns:
        DensityGrid with mask reasons and integrated mass. Each slice
        carries resolution open cells between two masked boundary cells.
    """
    if resolution < MIN_RESOLUTION:
        raise DensityError(f"Resolution must be at least {MIN_RESOLUTION}, got {resolution}")
    if not t > 0.0:
        raise DensityError(f"Time must be positive, got {t!r}")
    service = service or get_density_service()
    threads = threads or get_settings().threads

    slices, d_theta = domain_slices(law, k, t, resolution, step)
    per_ray = resolution + 2
    r_cells: List[float] = []
    theta_cells: List[float] = []
    area_cells: List[float] = []
    reasons: List[MaskReason] = []
    for ray in slices:
        radii, widths, band = _ray_cells(ray, resolution, boundary_band(ray, service))
        r_cells.extend(radii)
        theta_cells.extend([ray.theta] * per_ray)
        area_cells.extend(r * w * d_theta for r, w in zip(radii, widths))
        reasons.extend(MaskReason.BOUNDARY if edge else MaskReason.NONE for edge in band)

    r_arr = np.asarray(r_cells, dtype=np.float64)
    theta_arr = np.asarray(theta_cells, dtype=np.float64)
    values = np.zeros_like(r_arr)
    open_cells = [i for i, reason in enumerate(reasons) if reason == MaskReason.NONE]

    if k is None:
        for index, ray in enumerate(slices):
            cells = slice(index * per_ray + 1, (index + 1) * per_ray - 1)
            try:
                weight = service.radial_weight(law, t, ray.theta)
            except DensityError:
                reasons[cells] = [MaskReason.STENCIL] * resolution
                continue
            values[cells] = weight / r_arr[cells] ** 2
    else:
        steps: int = k
        points = [complex(r_arr[i] * np.exp(1j * theta_arr[i])) for i in open_cells]
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(
                pool.map(lambda z: _evaluate_cell(service, step, law, steps, t, z), points)
            )
        for index, (value, reason) in zip(open_cells, results):
            values[index] = value
            reasons[index] = reason

    masked = np.asarray([reason != MaskReason.NONE for reason in reasons], dtype=bool)
    grid = DensityGrid(
        k=k,
        t=t,
        r=r_arr,
        theta=theta_arr,
        area=np.asarray(area_cells, dtype=np.float64),
        values=values,
        masked=masked,
        reasons=[reason.value for reason in reasons],
    )
    logger.info("density_grid_built", **grid.summary())
    return grid

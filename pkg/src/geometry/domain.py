"""
Support Domain Geometry.

Provides the shape of the Brown measure support of u0 b_k(t):
- Lifetime minimizers, collision times and boundary radii per angle
- Membership in Sigma_k, Sigma_inf, the linearized domain and E_{2,k}
- The exclusion disk D_k(a, t) and the atom candidates S_k
- Topological phase classification by time
- Boundary point clouds and their Hausdorff distance
"""

import math
from typing import List, Optional

import numpy as np
import numpy.typing as npt
import structlog
from scipy.optimize import brentq, minimize_scalar
from scipy.spatial.distance import directed_hausdorff

from .lifetime import (
    BracketError,
    GeometryError,
    lifetime_infinity,
    lifetime_k,
    lifetime_k_dr,
)
from .models import (
    DomainSlice,
    InitialLaw,
    PhaseClassification,
    PhaseRegime,
    StepLawSummary,
)


logger = structlog.get_logger()

RADIUS_TOLERANCE = 1e-10
ROOT_XTOL = 1e-14
SCAN_POINTS = 512
SCAN_RADIUS = 4.0
MAX_DOUBLINGS = 200


def _lifetime_at(law: InitialLaw, k: int, r: float, theta: float) -> float:
    return lifetime_k(law, k, r * np.exp(1j * theta))


def _newton_polish(law: InitialLaw, k: int, r: float, theta: float, upper: float) -> float:
    """One Newton step on dT/dr = 0, kept only if it lowers T."""
    delta = 1e-6
    if r - delta <= 0.0 or r + delta >= upper or abs(r - 1.0) < 1e-5:
        return r
    d1 = lifetime_k_dr(law, k, r, theta)
    d2 = (lifetime_k_dr(law, k, r + delta, theta) - lifetime_k_dr(law, k, r - delta, theta)) / (
        2.0 * delta
    )
    if not math.isfinite(d1) or not math.isfinite(d2) or d2 <= 0.0:
        return r
    candidate = r - d1 / d2
    if not 0.0 < candidate < upper:
        return r
    if _lifetime_at(law, k, candidate, theta) <= _lifetime_at(law, k, r, theta):
        return candidate
    return r


def _bounded_minimum(law: InitialLaw, k: int, theta: float, lo: float, hi: float) -> float:
    """Minimizer of T_k on [lo, hi], endpoints included."""
    result = minimize_scalar(
        lambda r: _lifetime_at(law, k, r, theta),
        bounds=(lo, hi),
        method="bounded",
        options={"xatol": RADIUS_TOLERANCE},
    )
    best = float(result.x)
    best_value = _lifetime_at(law, k, best, theta)
    for endpoint in (lo, hi):
        value = _lifetime_at(law, k, endpoint, theta)
        if value <= best_value:
            best, best_value = endpoint, value
    return best


def r_min(law: InitialLaw, k: int, theta: float) -> DomainSlice:
    """
    Locate the minimizer of r -> T_k(r, theta).

    For u0 = 1 the profile is unimodal with its minimizer in [0, 1]; the
    search runs there and is polished by one Newton step. Other laws are
    scanned on [0, 4] first and flagged when the profile has several local
    minima.

    Args:
        law: Initial law.
        k: Number of steps.
        theta: Angle of the slice.

    Returns:
        Partial DomainSlice (r_min, t_star, unimodal).
    """
    unimodal = True
    if law.is_trivial:
        best = _bounded_minimum(law, k, theta, 0.0, 1.0)
        best = _newton_polish(law, k, best, theta, 1.0)
    else:
        radii = np.linspace(0.0, SCAN_RADIUS, SCAN_POINTS + 1)
        values = np.array([_lifetime_at(law, k, r, theta) for r in radii])
        interior = (values[1:-1] < values[:-2]) & (values[1:-1] <= values[2:])
        minima = int(np.sum(interior)) + int(values[0] <= values[1])
        unimodal = minima <= 1
        if not unimodal:
            logger.warning("lifetime_not_unimodal", k=k, theta=theta, local_minima=minima)
        idx = int(np.argmin(values))
        lo = radii[max(idx - 1, 0)]
        hi = radii[min(idx + 1, len(radii) - 1)]
        best = _bounded_minimum(law, k, theta, float(lo), float(hi))

    t_star = _lifetime_at(law, k, best, theta)
    return DomainSlice(
        theta=theta,
        r_min=best,
        t_star=t_star,
        r_minus=best,
        r_plus=best,
        unimodal=unimodal,
    )


def boundary_radii(law: InitialLaw, k: int, t: float, theta: float) -> DomainSlice:
    """
    Boundary radii r_minus <= r_min <= r_plus of Sigma_k(u0, t) at angle theta.

    Degenerate slices (t_star >= t) collapse to r_minus = r_plus = r_min.
    r_minus is 0 when T_k(0) = k does not exceed t.

    Raises:
        GeometryError: t is not positive.
        BracketError: the outer root could not be bracketed.
    """
    if t <= 0:
        raise GeometryError(f"Time must be positive, got {t}")

    slice_ = r_min(law, k, theta)
    if slice_.degenerate_at(t):
        return slice_

    def excess(r: float) -> float:
        return _lifetime_at(law, k, r, theta) - t

    upper = max(2.0 * slice_.r_min, 1.0)
    doublings = 0
    while excess(upper) <= 0.0:
        upper *= 2.0
        doublings += 1
        if doublings > MAX_DOUBLINGS:
            raise BracketError(
                "Outer boundary radius not bracketed",
                diagnostics={"k": k, "t": t, "theta": theta, "upper": upper},
            )
    slice_.r_plus = float(brentq(excess, slice_.r_min, upper, xtol=ROOT_XTOL))

    if excess(0.0) > 0.0 and slice_.r_min > 0.0:
        slice_.r_minus = float(brentq(excess, 0.0, slice_.r_min, xtol=ROOT_XTOL))
    else:
        slice_.r_minus = 0.0
    return slice_


def sigma_k_contains(law: InitialLaw, k: int, t: float, z: complex) -> bool:
    """True when z lies in the open domain Sigma_k(u0, t)."""
    return lifetime_k(law, k, z) < t


def sigma_infinity_contains(law: InitialLaw, t: float, z: complex) -> bool:
    """True when z lies in the open domain Sigma_inf(u0, t)."""
    return lifetime_infinity(law, z) < t


def omega_k_contains(law: InitialLaw, k: int, t: float, lam: complex) -> bool:
    """Linearized-domain membership: lam^k in Sigma_k(u0, t)."""
    return sigma_k_contains(law, k, t, complex(lam) ** k)


def d_k_disk(k: int, t: float, summary: StepLawSummary) -> Optional[float]:
    """
    Radius of the exclusion disk D_k(a, t) in the z-plane.

    Returns:
        None when the disk is empty (non-invertible step or t < k ||a^-1||^2),
        else (t/(k ||a^-1||^2) - 1)^{k/2}.
    """
    if not summary.invertible:
        return None
    ratio = t / (k * summary.inv_l2_sq)
    if ratio < 1.0:
        return None
    return float((ratio - 1.0) ** (k / 2.0))


def e2_contains(
    law: InitialLaw,
    k: int,
    t: float,
    lam: complex,
    summary: StepLawSummary,
) -> bool:
    """
    lambda-plane disk E_{2,k}(t): ||Z - lam||_2^2 <= t/(k ||a^-1||_2^2).

    For k >= 2 the left side is |lam|^2 + 1.
    """
    if not summary.invertible:
        return False
    points, weights = law.root_points(k)
    second_moment = float(np.sum(weights * np.abs(points - complex(lam)) ** 2))
    return second_moment <= t / (k * summary.inv_l2_sq)


def critical_time(k: int, law: Optional[InitialLaw] = None) -> float:
    """Collision time t_k^c = t_star(pi) of the trivial initial condition."""
    return r_min(law or InitialLaw.trivial(), k, math.pi).t_star


def classify_phase(
    k: int,
    t: float,
    summary: StepLawSummary,
    law: Optional[InitialLaw] = None,
) -> PhaseClassification:
    """
    Topological regime of Sigma_k(1, t) minus the exclusion disk.

    Thresholds are t_k^c, k and k ||a^-1||_2^2. Exact hits use a relative
    tolerance of 1e-9; t = k takes precedence over the other thresholds.
    """
    law = law or InitialLaw.trivial()
    t_c = critical_time(k, law)
    inverse_threshold = k * summary.inv_l2_sq if summary.invertible else None

    def same(a: float, b: float) -> bool:
        return math.isclose(a, b, rel_tol=1e-9, abs_tol=1e-12)

    if same(t, k):
        regime = PhaseRegime.PUNCTURED_DISK
    elif inverse_threshold is not None and (t > inverse_threshold or same(t, inverse_threshold)):
        regime = PhaseRegime.ANNULUS_POST_INVERSE
    elif t > k:
        regime = PhaseRegime.DISK_POST
    elif same(t, t_c):
        regime = PhaseRegime.DISK_WITH_ANNULAR_CLOSURE
    elif t < t_c:
        regime = PhaseRegime.DISK
    else:
        regime = PhaseRegime.ANNULUS

    return PhaseClassification(
        regime=regime,
        t=t,
        t_k_c=t_c,
        k=k,
        k_inv_l2_sq=inverse_threshold,
        d_k_radius=d_k_disk(k, t, summary),
    )


def s_k_atoms(law: InitialLaw, k: int, summary: StepLawSummary) -> List[complex]:
    """
    Candidate atom locations of the Brown measure in the z-plane.

    The atom e^{i theta_i} qualifies when w_i/k + phi(ker a) >= 1.
    """
    candidates: List[complex] = []
    for angle, weight in zip(law.atom_angles, law.atom_weights):
        if weight / k + summary.kernel_mass >= 1.0:
            candidates.append(complex(np.exp(1j * angle)))
    return candidates


def angular_interval(law: Optional[InitialLaw], k: Optional[int], t: float) -> float:
    """
    Half-width theta* of the angular range I_k(t) for u0 = 1.

    k = None selects the k = infinity interval arccos(1 - t/2).
    Returns pi when every angle meets the domain.
    """
    if law is not None and not law.is_trivial:
        raise GeometryError("Angular interval is only defined for the trivial initial law")
    if k is None:
        return math.pi if t >= 4.0 else math.acos(1.0 - t / 2.0)

    trivial = InitialLaw.trivial()
    if t > r_min(trivial, k, math.pi).t_star:
        return math.pi
    return float(
        brentq(lambda theta: r_min(trivial, k, theta).t_star - t, 0.0, math.pi, xtol=1e-12)
    )


def sigma_infinity_boundary(law: InitialLaw, t: float, theta: float) -> float:
    """
    Outer boundary radius r(t, theta) >= 1 of Sigma_inf(u0, t).

    Returns 1 when the angle misses the domain. The inner boundary is the
    inversion 1/r(t, theta).

    Raises:
        GeometryError: t is not positive.
        BracketError: no radius with T_inf >= t was found.
    """
    if t <= 0:
        raise GeometryError(f"Time must be positive, got {t}")

    unit = np.exp(1j * theta)

    def excess(r: float) -> float:
        return lifetime_infinity(law, r * unit) - t

    if excess(1.0) >= 0.0:
        return 1.0

    upper = 2.0
    doublings = 0
    while excess(upper) <= 0.0:
        upper *= 2.0
        doublings += 1
        if doublings > MAX_DOUBLINGS:
            raise BracketError(
                "Sigma_inf boundary not bracketed",
                diagnostics={"t": t, "theta": theta, "upper": upper},
            )

    if law.is_trivial:
        return float(brentq(excess, 1.0, upper, xtol=ROOT_XTOL))

    radii = np.geomspace(1.0, upper, SCAN_POINTS + 1)
    values = np.array([excess(r) for r in radii])
    below = np.nonzero(values < 0.0)[0]
    last = int(below[-1])
    return float(brentq(excess, radii[last], radii[last + 1], xtol=ROOT_XTOL))


def dilated_support_contains(
    law: InitialLaw,
    k: Optional[int],
    t: float,
    z: complex,
    eps: float,
    summary: Optional[StepLawSummary] = None,
) -> bool:
    """
    Membership in the eps-dilation of the closed support.

    The support is the closure of Sigma_k(u0, t) minus D_k(a, t), or the
    closure of Sigma_inf(u0, t) when k is None. Probes z and 24 points on
    circles of radius eps and eps/2 around it.
    """
    radius = d_k_disk(k, t, summary) if (k is not None and summary is not None) else None

    def inside(w: complex) -> bool:
        if k is None:
            return lifetime_infinity(law, w) <= t
        if radius is not None and abs(w) < radius:
            return False
        return lifetime_k(law, k, w) <= t

    z = complex(z)
    if inside(z):
        return True
    probes = [z + eps * np.exp(2j * np.pi * m / 16) for m in range(16)]
    probes += [z + 0.5 * eps * np.exp(2j * np.pi * (m + 0.5) / 8) for m in range(8)]
    return any(inside(complex(w)) for w in probes)


def boundary_points(
    law: InitialLaw,
    k: Optional[int],
    t: float,
    n_angles: int = 1024,
) -> npt.NDArray[np.complex128]:
    """
    Boundary of Sigma_k(u0, t) (or Sigma_inf when k is None) sampled by slices.

    Each non-degenerate slice contributes its outer radius and, when
    positive, its inner radius.
    """
    points: List[complex] = []
    for theta in np.linspace(-np.pi, np.pi, n_angles, endpoint=False):
        unit = complex(np.exp(1j * theta))
        if k is None:
            outer = sigma_infinity_boundary(law, t, float(theta))
            if outer > 1.0:
                points.append(outer * unit)
                points.append(unit / outer)
        else:
            slice_ = boundary_radii(law, k, t, float(theta))
            if slice_.degenerate_at(t):
                continue
            points.append(slice_.r_plus * unit)
            if slice_.r_minus > 0.0:
                points.append(slice_.r_minus * unit)
    return np.asarray(points, dtype=np.complex128)


def hausdorff_distance(
    a: npt.NDArray[np.complex128],
    b: npt.NDArray[np.complex128],
) -> float:
    """Symmetric Hausdorff distance between two planar point clouds."""
    if len(a) == 0 or len(b) == 0:
        raise GeometryError("Hausdorff distance needs two nonempty point sets")
    pa = np.column_stack([a.real, a.imag])
    pb = np.column_stack([b.real, b.imag])
    return float(max(directed_hausdorff(pa, pb)[0], directed_hausdorff(pb, pa)[0]))

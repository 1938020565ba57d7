"""
Lifetime Functions.

Provides the scalar fields whose sublevel sets are the support domains:
- T_k(u0, z), the k-step lifetime, and its polar form for u0 = 1
- T_inf(u0, z), the free multiplicative Brownian motion lifetime
- The closed form of the mean inverse squared distance to the k-th roots
  of unity

Both lifetimes are continued by their analytic limits at |z| = 1, at
z = 0 and at atoms of the initial law.
"""

import math
from typing import Any, Dict, Optional

import numpy as np

from .models import InitialLaw


UNIT_CIRCLE_BAND = 1e-8
ROOT_OF_UNITY_TOLERANCE = 1e-14


class GeometryError(Exception):
    """Base geometry error."""
    pass


class PoleError(GeometryError):
    """Evaluation at a pole of a closed form."""
    pass


class BracketError(GeometryError):
    """Root bracket could not be established."""

    def __init__(self, message: str, diagnostics: Optional[Dict[str, Any]] = None):
        super().__init__(message)
        self.diagnostics = diagnostics or {}


def kernel_sum(law: InitialLaw, z: complex) -> float:
    """sum_i w_i / |e^{i theta_i} - z|^2, infinite at an atom."""
    d2 = np.abs(law.atoms - complex(z)) ** 2
    if np.any(d2 == 0.0):
        return float("inf")
    return float(np.sum(law.atom_weights / d2))


def k_prefactor(k: int, r: float) -> float:
    """k (r^{2/k} - 1)/(r^2 - 1), continued by 1 at r = 1."""
    if r == 0.0:
        return float(k)
    s = 2.0 * math.log(r)
    if abs(r - 1.0) < UNIT_CIRCLE_BAND:
        return 1.0 + 0.5 * s * (1.0 / k - 1.0)
    return k * math.expm1(s / k) / math.expm1(s)


def infinity_prefactor(r: float) -> float:
    """log(r^2)/(r^2 - 1), continued by 1 at r = 1."""
    if r == 0.0:
        return float("inf")
    s = 2.0 * math.log(r)
    if abs(r - 1.0) < UNIT_CIRCLE_BAND:
        return 1.0 - 0.5 * s
    return s / math.expm1(s)


def lifetime_k(law: InitialLaw, k: int, z: complex) -> float:
    """
    Lifetime T_k(u0, z) of the k-step walk.

    Args:
        law: Atomic spectral law of u0.
        k: Number of steps (>= 1).
        z: Query point.

    Returns:
        Nonnegative lifetime; 0 at atoms of the law, k at z = 0.
    """
    s = kernel_sum(law, z)
    if math.isinf(s):
        return 0.0
    return k_prefactor(k, abs(complex(z))) / s


def lifetime_infinity(law: InitialLaw, z: complex) -> float:
    """Lifetime T_inf(u0, z); 0 at atoms, +inf at z = 0."""
    z = complex(z)
    if z == 0:
        return float("inf")
    s = kernel_sum(law, z)
    if math.isinf(s):
        return 0.0
    return infinity_prefactor(abs(z)) / s


def lifetime_k_polar(k: int, r: float, theta: float) -> float:
    """T_k(r, theta) for u0 = 1, evaluated directly in polar coordinates."""
    chord = r * r - 2.0 * r * math.cos(theta) + 1.0
    if abs(r - 1.0) < UNIT_CIRCLE_BAND:
        return 2.0 * (1.0 - math.cos(theta))
    return k * (r ** (2.0 / k) - 1.0) * chord / (r * r - 1.0)


def _k_prefactor_dr(k: int, r: float) -> float:
    """Radial derivative of k_prefactor."""
    if abs(r - 1.0) < 1e-6:
        return (1.0 / k - 1.0) / r
    if r == 0.0:
        if k == 1:
            return 0.0
        return -2.0 if k == 2 else float("-inf")
    power = r ** (2.0 / k)
    numerator = 2.0 * power / r * (r * r - 1.0) - 2.0 * r * (power - 1.0)
    return k * numerator / (r * r - 1.0) ** 2


def lifetime_k_dr(law: InitialLaw, k: int, r: float, theta: float) -> float:
    """Analytic derivative of r -> T_k(u0, r e^{i theta})."""
    phase = theta - law.atom_angles
    chord = r * r - 2.0 * r * np.cos(phase) + 1.0
    if np.any(chord == 0.0):
        return 0.0
    s = float(np.sum(law.atom_weights / chord))
    ds = float(-np.sum(law.atom_weights * (2.0 * r - 2.0 * np.cos(phase)) / chord ** 2))
    f = k_prefactor(k, r)
    df = _k_prefactor_dr(k, r)
    return df / s - f * ds / (s * s)


def roots_sum_closed_form(k: int, lam: complex) -> float:
    """
    (1/k^2) sum_j 1/|z_j - lam|^2 over the k-th roots of unity z_j.

    Uses (1/k) (|lam|^{2k} - 1)/((|lam|^2 - 1)|lam^k - 1|^2); the first
    ratio is the geometric sum of |lam|^{2m}, m < k, which is exact at
    |lam| = 1.

    Raises:
        PoleError: lam is a k-th root of unity.
    """
    lam = complex(lam)
    denominator = abs(lam ** k - 1.0) ** 2
    if denominator <= ROOT_OF_UNITY_TOLERANCE ** 2:
        raise PoleError(f"{lam!r} is a {k}-th root of unity")
    x = abs(lam) ** 2
    geometric = float(np.sum(x ** np.arange(k)))
    return geometric / (k * denominator)


def roots_sum_direct(k: int, lam: complex) -> float:
    """Direct summation of (1/k^2) sum_j 1/|z_j - lam|^2."""
    roots = np.exp(2j * np.pi * np.arange(k) / k)
    return float(np.sum(1.0 / np.abs(roots - complex(lam)) ** 2) / (k * k))

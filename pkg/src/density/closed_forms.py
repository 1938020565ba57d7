"""
Closed-Form k = 2 Densities.

Explicit Brown-measure densities of u0 b_2(t) for u0 = 1:
- Haar unitary steps
- Circular steps

Both are singular on the closed negative real axis, where |z| + Re z = 0.
"""

import math

from src.geometry import PoleError


def _half_plane_weight(z: complex) -> float:
    w = abs(z) + z.real
    if w <= 0.0:
        raise PoleError(f"Density pole at {z!r}: |z| + Re z = 0")
    return w


def density_k2_haar(t: float, z: complex) -> float:
    """
    Density for two Haar unitary steps.

    (1/(4 pi |z|)) [4t((2(|z|+1) - t)^2 + 8w) / (4|z-1|^2 + t^2 - 4t(|z|+1))^2 - 1/w]
    with w = |z| + Re z.
    """
    z = complex(z)
    w = _half_plane_weight(z)
    modulus = abs(z)
    numerator = 4.0 * t * ((2.0 * (modulus + 1.0) - t) ** 2 + 8.0 * w)
    denominator = (4.0 * abs(z - 1.0) ** 2 + t * t - 4.0 * t * (modulus + 1.0)) ** 2
    return (numerator / denominator - 1.0 / w) / (4.0 * math.pi * modulus)


def density_k2_circular(t: float, z: complex) -> float:
    """
    Density for two circular steps.

    (1/(2 pi |z|)) [2/t - 1/(4w) + t/(4w sqrt(t^2 + 32w))] with w = |z| + Re z.
    """
    z = complex(z)
    w = _half_plane_weight(z)
    bracket = 2.0 / t - 1.0 / (4.0 * w) + t / (4.0 * w * math.sqrt(t * t + 32.0 * w))
    return bracket / (2.0 * math.pi * abs(z))

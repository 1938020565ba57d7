"""
Cauchy and H Transforms.

Transforms of symmetric measures evaluated on the positive imaginary axis,
where every iterate of the subordination map stays:
- G(iy) = -i sum w y/(y^2 + x^2)
- H(iy) = 1/G(iy) - iy
- The semicircle H for the symmetrized |sqrt(v) c|, c circular
- The law of |Z - lambda| for the k-th root operator Z
- The periodized Lorentzian sum entering the k = infinity equation
"""

import math

import numpy as np
import numpy.typing as npt

from src.geometry import InitialLaw

from .models import SymmetricAtomicMeasure


class SubordinationError(Exception):
    """Base subordination error."""
    pass


class NonPositiveArgumentError(SubordinationError):
    """Argument must be strictly positive."""
    pass


def _check_positive(y: float) -> None:
    if not y > 0.0:
        raise NonPositiveArgumentError(f"Expected a positive argument, got {y!r}")


def cauchy_symmetric(m: SymmetricAtomicMeasure, y: float) -> complex:
    """
    Cauchy transform of a symmetric atomic measure at iy.

    Each +-x pair is combined analytically, so the value is purely imaginary
    with negative imaginary part.
    """
    _check_positive(y)
    x = m.atom_values
    g = float(np.sum(m.atom_weights * y / (y * y + x * x)))
    return complex(0.0, -g)


def h_transform(m: SymmetricAtomicMeasure, y: float) -> complex:
    """H(iy) = 1/G(iy) - iy, on the closed positive imaginary axis."""
    _check_positive(y)
    x2 = m.atom_values ** 2
    w = m.atom_weights
    g = float(np.sum(w * y / (y * y + x2)))
    # 1/g - y written as (1 - y g)/g to avoid cancellation at large y
    defect = float(np.sum(w * x2 / (y * y + x2)))
    return complex(0.0, defect / g)


def semicircle_h(t_over_k: float, y: float) -> complex:
    """
    H transform of the semicircle law of variance v = t/k at iy.

    H(zeta) = (-zeta + sqrt(zeta^2 - 4v))/2, so H(iy) = i(sqrt(y^2 + 4v) - y)/2.
    For k = 2 the radicand constant 4v equals 2t.
    """
    _check_positive(y)
    if t_over_k < 0.0:
        raise NonPositiveArgumentError(f"Variance must be nonnegative, got {t_over_k!r}")
    return complex(0.0, 2.0 * t_over_k / (math.sqrt(y * y + 4.0 * t_over_k) + y))


def shifted_z_measure(law: InitialLaw, k: int, lam: complex) -> SymmetricAtomicMeasure:
    """
    Symmetrized law of |Z - lambda|.

    Z has eigenvalues e^{i(2 pi j + theta_i)/k} with weights w_i/k.
    """
    points, weights = law.root_points(k)
    distances = np.abs(points - complex(lam))
    return SymmetricAtomicMeasure(values=distances.tolist(), weights=weights.tolist())


def wrapped_lorentzian_sum(c_sq: float, phi: npt.ArrayLike) -> npt.NDArray[np.float64]:
    """
    S(c^2; phi) = sum_{j in Z} 1/(c^2 + (2 pi j + phi)^2) in closed form.

    Evaluates sinh(c)/(2c(cosh c - cos phi)) as
    (1 - e^{-2c}) / (2c((1 - e^{-c})^2 + 4 e^{-c} sin^2(phi/2))).
    At c = 0 the sum is 1/(4 sin^2(phi/2)), infinite at phi = 0 mod 2 pi.
    """
    if c_sq < 0.0:
        raise NonPositiveArgumentError(f"c^2 must be nonnegative, got {c_sq!r}")
    half_chord = np.sin(0.5 * np.asarray(phi, dtype=np.float64)) ** 2
    with np.errstate(divide="ignore"):
        if c_sq == 0.0:
            return np.asarray(1.0 / (4.0 * half_chord), dtype=np.float64)
        c = math.sqrt(c_sq)
        decay = math.exp(-c)
        numerator = -math.expm1(-2.0 * c)
        denominator = 2.0 * c * (math.expm1(-c) ** 2 + 4.0 * decay * half_chord)
        return np.asarray(numerator / denominator, dtype=np.float64)


def wrapped_lorentzian_sum_truncated(c_sq: float, phi: float, terms: int) -> float:
    """Direct sum of 1/(c^2 + (2 pi j + phi)^2) over |j| <= terms."""
    j = np.arange(-terms, terms + 1, dtype=np.float64)
    return float(np.sum(1.0 / (c_sq + (2.0 * np.pi * j + phi) ** 2)))

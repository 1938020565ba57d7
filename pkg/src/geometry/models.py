"""
Lifetime Geometry Models.

Provides data models for the support domains of the walk's Brown measure:
- Atomic initial laws on the unit circle
- Step-law summaries (inverse L2 norm, kernel mass)
- Radial slices of the domain at a fixed angle
- Topological phase classification
"""

from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict, List, Optional, Tuple

import numpy as np
import numpy.typing as npt


WEIGHT_TOLERANCE = 1e-12


def wrap_angle(theta: float) -> float:
    """Map an angle into (-pi, pi]."""
    theta = float(theta)
    if -np.pi < theta <= np.pi:
        return theta
    wrapped = float(np.angle(np.exp(1j * theta)))
    if wrapped <= -np.pi:
        wrapped += 2.0 * np.pi
    return wrapped


@dataclass
class InitialLaw:
    """
    Spectral law of the initial unitary: atoms e^{i theta} with weights.

    Angles live in (-pi, pi] and are distinct; weights are positive and sum
    to 1.
    """
    angles: List[float]
    weights: List[float]

    _angles: npt.NDArray[np.float64] = field(init=False, repr=False, compare=False)
    _weights: npt.NDArray[np.float64] = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        self.angles = [wrap_angle(a) for a in self.angles]
        self._angles = np.asarray(self.angles, dtype=np.float64)
        self._weights = np.asarray(self.weights, dtype=np.float64)

    @classmethod
    def trivial(cls) -> "InitialLaw":
        """The law of u0 = 1."""
        return cls(angles=[0.0], weights=[1.0])

    @property
    def is_trivial(self) -> bool:
        """True for the point mass at angle 0."""
        return len(self.angles) == 1 and self.angles[0] == 0.0

    @property
    def atom_angles(self) -> npt.NDArray[np.float64]:
        """Angles as an array."""
        return self._angles

    @property
    def atom_weights(self) -> npt.NDArray[np.float64]:
        """Weights as an array."""
        return self._weights

    @property
    def atoms(self) -> npt.NDArray[np.complex128]:
        """Atom locations e^{i theta} on the unit circle."""
        return np.exp(1j * self._angles)

    def validation_errors(self) -> List[str]:
        """Return the list of violated invariants (empty when valid)."""
        errors: List[str] = []
        if len(self.angles) == 0:
            errors.append("initial law has no atoms")
            return errors
        if len(self.angles) != len(self.weights):
            errors.append("angles and weights differ in length")
            return errors
        if np.any(self._weights <= 0.0):
            errors.append("atom weights must be positive")
        if abs(float(np.sum(self._weights)) - 1.0) > WEIGHT_TOLERANCE:
            errors.append(f"weights sum to {float(np.sum(self._weights))!r}, expected 1")
        if len(set(self.angles)) != len(self.angles):
            errors.append("atom angles must be distinct")
        return errors

    def root_points(self, k: int) -> Tuple[npt.NDArray[np.complex128], npt.NDArray[np.float64]]:
        """
        Spectrum of the k-th root operator Z.

        Returns:
            Tuple (points, weights): e^{i(2 pi j + theta_i)/k} for j = 0..k-1
            with weight w_i/k each.
        """
        j = np.arange(k)[:, np.newaxis]
        points = np.exp(1j * (2.0 * np.pi * j + self._angles[np.newaxis, :]) / k)
        weights = np.broadcast_to(self._weights[np.newaxis, :] / k, points.shape)
        return points.ravel(), np.array(weights).ravel()

    def to_dict(self) -> Dict[str, Any]:
        """Convert to dictionary."""
        return {
            "angles": [float(a) for a in self.angles],
            "weights": [float(w) for w in self.weights],
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "InitialLaw":
        """Create from dictionary."""
        return cls(angles=list(data["angles"]), weights=list(data["weights"]))


@dataclass
class StepLawSummary:
    """Scalars of the step law that shape the domain."""
    inv_l2_sq: float  # ||a^-1||_2^2 in (0, inf]
    kernel_mass: float = 0.0  # phi(ker a) in [0, 1)

    @classmethod
    def haar(cls) -> "StepLawSummary":
        """Haar unitary step."""
        return cls(inv_l2_sq=1.0, kernel_mass=0.0)

    @classmethod
    def circular(cls) -> "StepLawSummary":
        """Circular step (continuous singular values reaching 0)."""
        return cls(inv_l2_sq=float("inf"), kernel_mass=0.0)

    @property
    def invertible(self) -> bool:
        """True when ||a^-1||_2 is finite."""
        return bool(np.isfinite(self.inv_l2_sq))

    def to_dict(self) -> Dict[str, Any]:
        """Convert to dictionary."""
        return {
            "inv_l2_sq": self.inv_l2_sq if self.invertible else None,
            "kernel_mass": self.kernel_mass,
        }


@dataclass
class DomainSlice:
    """Radial slice of Sigma_k at angle theta."""
    theta: float
    r_min: float  # Minimizer of r -> T_k(r, theta)
    t_star: float  # T_k(r_min, theta), the collision time of the slice
    r_minus: float = 0.0
    r_plus: float = 0.0
    unimodal: bool = True  # False when the lifetime profile has several minima

    def degenerate_at(self, t: float) -> bool:
        """True when the slice does not meet the domain at time t."""
        return self.t_star >= t

    def to_dict(self) -> Dict[str, Any]:
        """Convert to dictionary."""
        return {
            "theta": self.theta,
            "r_minus": self.r_minus,
            "r_min": self.r_min,
            "r_plus": self.r_plus,
            "t_star": self.t_star,
            "unimodal": self.unimodal,
        }


class PhaseRegime(str, Enum):
    """Topology of the support at time t (trivial initial condition)."""
    DISK = "disk"  # t < t_k^c
    DISK_WITH_ANNULAR_CLOSURE = "disk-with-annular-closure"  # t = t_k^c
    ANNULUS = "annulus"  # t_k^c < t < k
    PUNCTURED_DISK = "punctured-disk"  # t = k
    DISK_POST = "disk-post"  # k < t, exclusion disk empty
    ANNULUS_POST_INVERSE = "annulus-post-inverse"  # t >= k ||a^-1||_2^2


@dataclass
class PhaseClassification:
    """Regime plus the thresholds it was read from."""
    regime: PhaseRegime
    t: float
    t_k_c: float
    k: int
    k_inv_l2_sq: Optional[float]  # None when the step is not L2-invertible
    d_k_radius: Optional[float] = None

    @property
    def thresholds(self) -> Dict[str, Optional[float]]:
        """Ordered thresholds t_k^c <= k <= k ||a^-1||_2^2."""
        return {
            "t_k_c": self.t_k_c,
            "k": float(self.k),
            "k_inv_l2_sq": self.k_inv_l2_sq,
        }

    def to_dict(self) -> Dict[str, Any]:
        """Convert to dictionary."""
        return {
            "regime": self.regime.value,
            "t": self.t,
            "thresholds": self.thresholds,
            "d_k_radius": self.d_k_radius,
        }

"""
Random Matrix Ensemble Models.

Provides data models for matrix sampling including:
- Complex matrix type alias
- Atomic singular-value laws of bi-invariant steps
- Quantile discretization of those laws
"""

from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict, List

import numpy as np
import numpy.typing as npt
from scipy.optimize import brentq


ComplexMatrix = npt.NDArray[np.complex128]

WEIGHT_TOLERANCE = 1e-12


class Discretization(str, Enum):
    """How an n-point diagonal is drawn from a singular-value law."""
    QUANTILE = "quantile"  # Mid-point quantiles (i - 1/2)/n, deterministic
    IID = "iid"  # Independent draws from the law


@dataclass
class SingularLaw:
    """
    Law of |a| for a bi-invariant step: finitely many atoms.

    Atoms are (value >= 0, weight > 0). Weights sum to 1; when normalized the
    second moment sum(w * sigma^2) is 1 as well.
    """
    values: List[float]
    weights: List[float]
    normalized: bool = True

    _values: npt.NDArray[np.float64] = field(init=False, repr=False, compare=False)
    _weights: npt.NDArray[np.float64] = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        self._values = np.asarray(self.values, dtype=np.float64)
        self._weights = np.asarray(self.weights, dtype=np.float64)

    @classmethod
    def point(cls, value: float = 1.0) -> "SingularLaw":
        """Single atom law (value 1 is the Haar step)."""
        return cls(values=[value], weights=[1.0], normalized=abs(value - 1.0) < WEIGHT_TOLERANCE)

    @property
    def atom_values(self) -> npt.NDArray[np.float64]:
        """Atom locations as an array."""
        return self._values

    @property
    def atom_weights(self) -> npt.NDArray[np.float64]:
        """Atom weights as an array."""
        return self._weights

    @property
    def second_moment(self) -> float:
        """sum(w * sigma^2), i.e. ||a||_2^2."""
        return float(np.sum(self._weights * self._values ** 2))

    @property
    def kernel_mass(self) -> float:
        """Weight sitting at sigma = 0."""
        return float(np.sum(self._weights[self._values == 0.0]))

    @property
    def inv_l2_sq(self) -> float:
        """||a^-1||_2^2 = sum(w / sigma^2), infinite with any kernel."""
        if self.kernel_mass > 0.0:
            return float("inf")
        return float(np.sum(self._weights / self._values ** 2))

    def validation_errors(self) -> List[str]:
        """Return the list of violated invariants (empty when valid)."""
        errors: List[str] = []
        if len(self.values) == 0:
            errors.append("law has no atoms")
            return errors
        if len(self.values) != len(self.weights):
            errors.append("values and weights differ in length")
            return errors
        if np.any(self._values < 0.0) or not np.all(np.isfinite(self._values)):
            errors.append("atom values must be finite and nonnegative")
        if np.any(self._weights <= 0.0):
            errors.append("atom weights must be positive")
        if abs(float(np.sum(self._weights)) - 1.0) > WEIGHT_TOLERANCE:
            errors.append(f"weights sum to {float(np.sum(self._weights))!r}, expected 1")
        if self.normalized and abs(self.second_moment - 1.0) > WEIGHT_TOLERANCE:
            errors.append(f"second moment {self.second_moment!r} is not 1")
        return errors

    def quantile(self, u: npt.ArrayLike) -> npt.NDArray[np.float64]:
        """Left-continuous quantile function of the atomic law."""
        order = np.argsort(self._values, kind="stable")
        sorted_values = self._values[order]
        cdf = np.cumsum(self._weights[order])
        idx = np.searchsorted(cdf, np.asarray(u, dtype=np.float64), side="left")
        return np.asarray(sorted_values[np.clip(idx, 0, len(sorted_values) - 1)])

    def midpoint_quantiles(self, n: int) -> npt.NDArray[np.float64]:
        """The n-point diagonal quantile((i - 1/2)/n), i = 1..n."""
        return self.quantile((np.arange(1, n + 1) - 0.5) / n)

    def to_dict(self) -> Dict[str, Any]:
        """Convert to dictionary."""
        return {
            "values": [float(v) for v in self.values],
            "weights": [float(w) for w in self.weights],
            "normalized": self.normalized,
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "SingularLaw":
        """Create from dictionary."""
        return cls(
            values=list(data["values"]),
            weights=list(data["weights"]),
            normalized=data.get("normalized", True),
        )


def _quarter_circle_cdf(x: float) -> float:
    """CDF of |c| for a circular element with E|c|^2 = 1 (density sqrt(4 - x^2)/pi)."""
    return float((x * np.sqrt(4.0 - x * x) / 2.0 + 2.0 * np.arcsin(x / 2.0)) / np.pi)


def quarter_circle_law(n_atoms: int = 512) -> SingularLaw:
    """
    Discretize the quarter-circle law on [0, 2] at mid-point quantiles.

    The atoms are rescaled so the law is normalized (second moment 1).

    Args:
        n_atoms: Number of equal-weight atoms.

    Returns:
        Normalized SingularLaw.
    """
    levels = (np.arange(1, n_atoms + 1) - 0.5) / n_atoms
    atoms = np.array([
        brentq(lambda x, u=u: _quarter_circle_cdf(x) - u, 0.0, 2.0, xtol=1e-15)
        for u in levels
    ])
    atoms = atoms / np.sqrt(np.mean(atoms ** 2))
    weights = np.full(n_atoms, 1.0 / n_atoms)
    # Equal weights can drift off 1 in the last bits.
    weights[-1] = 1.0 - float(np.sum(weights[:-1]))
    return SingularLaw(values=atoms.tolist(), weights=weights.tolist(), normalized=True)

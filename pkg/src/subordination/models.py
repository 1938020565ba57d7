"""
Subordination Models.

Provides data models for the Denjoy-Wolff solve including:
- Symmetric atomic measures (laws of |X| symmetrized)
- Step laws of the walk (Haar unitary, circular, atomic singular values)
- Tri-state eta results with residual diagnostics
- Solver configuration and statistics
"""

from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict, List, Optional

import numpy as np
import numpy.typing as npt

from src.ensembles import SingularLaw
from src.geometry import StepLawSummary


@dataclass
class SymmetricAtomicMeasure:
    """
    Symmetrization of an atomic law on [0, inf).

    Each atom x > 0 puts weight/2 at +x and -x; an atom at 0 keeps its
    whole weight at 0.
    """
    values: List[float]
    weights: List[float]

    _values: npt.NDArray[np.float64] = field(init=False, repr=False, compare=False)
    _weights: npt.NDArray[np.float64] = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        self._values = np.asarray(self.values, dtype=np.float64)
        self._weights = np.asarray(self.weights, dtype=np.float64)

    @property
    def atom_values(self) -> npt.NDArray[np.float64]:
        """Atom locations x >= 0."""
        return self._values

    @property
    def atom_weights(self) -> npt.NDArray[np.float64]:
        """Atom weights."""
        return self._weights

    def dilate(self, c: float) -> "SymmetricAtomicMeasure":
        """Push forward by x -> c x."""
        return SymmetricAtomicMeasure(
            values=[c * v for v in self.values],
            weights=list(self.weights),
        )

    def to_dict(self) -> Dict[str, Any]:
        """Convert to dictionary."""
        return {
            "values": [float(v) for v in self.values],
            "weights": [float(w) for w in self.weights],
        }


class StepKind(str, Enum):
    """Distribution families of the walk's steps."""
    HAAR = "haar"  # Haar unitary, |a| = 1
    CIRCULAR = "circular"  # Circular element, sampled as Ginibre
    ATOMIC = "atomic"  # Bi-invariant with an atomic singular-value law


@dataclass
class StepLaw:
    """Step distribution of the walk, normalized to ||a||_2 = 1."""
    kind: StepKind
    singular: Optional[SingularLaw] = None  # Required for ATOMIC

    @classmethod
    def haar(cls) -> "StepLaw":
        """Haar unitary steps."""
        return cls(kind=StepKind.HAAR)

    @classmethod
    def circular(cls) -> "StepLaw":
        """Circular steps."""
        return cls(kind=StepKind.CIRCULAR)

    @classmethod
    def atomic(cls, singular: SingularLaw) -> "StepLaw":
        """Bi-invariant steps with the given singular-value law."""
        return cls(kind=StepKind.ATOMIC, singular=singular)

    @property
    def singular_law(self) -> SingularLaw:
        """Atomic singular-value law (the single atom 1 for Haar)."""
        if self.kind == StepKind.HAAR:
            return SingularLaw.point(1.0)
        if self.singular is None:
            raise ValueError(f"Step kind {self.kind.value} has no atomic singular law")
        return self.singular

    @property
    def summary(self) -> StepLawSummary:
        """Inverse L2 norm and kernel mass of the step."""
        if self.kind == StepKind.HAAR:
            return StepLawSummary.haar()
        if self.kind == StepKind.CIRCULAR:
            return StepLawSummary.circular()
        law = self.singular_law
        return StepLawSummary(inv_l2_sq=law.inv_l2_sq, kernel_mass=law.kernel_mass)

    def validation_errors(self) -> List[str]:
        """Return the list of violated invariants (empty when valid)."""
        if self.kind != StepKind.ATOMIC:
            return []
        if self.singular is None:
            return ["atomic step law needs singular values"]
        errors = self.singular.validation_errors()
        if not self.singular.normalized:
            errors.append("atomic step law must be normalized to ||a||_2 = 1")
        return errors

    def to_dict(self) -> Dict[str, Any]:
        """Convert to dictionary."""
        return {
            "kind": self.kind.value,
            "singular": self.singular.to_dict() if self.singular else None,
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "StepLaw":
        """Create from dictionary."""
        singular = data.get("singular")
        return cls(
            kind=StepKind(data["kind"]),
            singular=SingularLaw.from_dict(singular) if singular else None,
        )


class EtaState(str, Enum):
    """Outcome of the subordination solve."""
    INTERIOR = "interior"  # eta > 0, inside the support domain
    EXTERIOR_ZERO = "exterior_zero"  # psi = 0, outside the closed domain
    DISK_INFINITE = "disk_infinite"  # psi = infinity, inside E_{2,k}


@dataclass
class EtaResult:
    """Result of solving for eta = -psi^2."""
    state: EtaState
    eta: float = 0.0
    iterations: int = 0
    residual: float = 0.0

    @property
    def is_interior(self) -> bool:
        """True for the interior state."""
        return self.state == EtaState.INTERIOR

    @property
    def psi(self) -> complex:
        """psi = i sqrt(eta) (infinite in the disk state)."""
        if self.state == EtaState.DISK_INFINITE:
            return complex(0.0, float("inf"))
        return complex(0.0, float(np.sqrt(self.eta)))

    def to_dict(self) -> Dict[str, Any]:
        """Convert to dictionary."""
        return {
            "state": self.state.value,
            "eta": self.eta,
            "iterations": self.iterations,
            "residual": self.residual,
        }


@dataclass
class SolverConfig:
    """Subordination solver configuration."""
    # Bracketing
    max_iterations: int = 200
    max_bracket_doublings: int = 200
    max_bracket_halvings: int = 2000

    # Accuracy
    fixed_point_tolerance: float = 1e-12
    boundary_band: float = 1e-6

    # Raw Denjoy-Wolff iteration
    dw_max_iterations: int = 100_000
    dw_tolerance: float = 1e-14

    def to_dict(self) -> Dict[str, Any]:
        """Convert to dictionary."""
        return {
            "max_iterations": self.max_iterations,
            "max_bracket_doublings": self.max_bracket_doublings,
            "max_bracket_halvings": self.max_bracket_halvings,
            "fixed_point_tolerance": self.fixed_point_tolerance,
            "boundary_band": self.boundary_band,
            "dw_max_iterations": self.dw_max_iterations,
            "dw_tolerance": self.dw_tolerance,
        }


@dataclass
class SolverStats:
    """Counts of solves by outcome."""
    total_solves: int = 0
    interior: int = 0
    exterior_zero: int = 0
    disk_infinite: int = 0
    failures: int = 0
    state_disagreements: int = 0

    def to_dict(self) -> Dict[str, Any]:
        """Convert to dictionary."""
        return {
            "total_solves": self.total_solves,
            "interior": self.interior,
            "exterior_zero": self.exterior_zero,
            "disk_infinite": self.disk_infinite,
            "failures": self.failures,
            "state_disagreements": self.state_disagreements,
        }

"""
Walk Models.

Provides data models for the matrix random walk experiments including:
- Walk configuration (dimension, steps, time, laws, seed, trials)
- Pooled empirical spectral distributions
- Time partitions for Wong-Zakai products
- Convergence reports and smallest-singular-value tables
"""

from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Tuple

import numpy as np
import numpy.typing as npt

from src.ensembles import Discretization
from src.geometry import InitialLaw
from src.subordination import StepLaw


@dataclass
class WalkConfig:
    """Description of U0 B_k(t) and how many independent copies to draw."""
    n: int
    k: int
    t: float
    step_law: StepLaw
    initial_law: InitialLaw = field(default_factory=InitialLaw.trivial)
    seed: int = 0
    trials: int = 1
    discretization: Discretization = Discretization.QUANTILE

    def validation_errors(self) -> List[str]:
        """Return the list of violated invariants (empty when valid)."""
        errors: List[str] = []
        if self.n < 1:
            errors.append(f"n must be >= 1, got {self.n}")
        if self.k < 1:
            errors.append(f"k must be >= 1, got {self.k}")
        if self.t < 0.0:
            errors.append(f"t must be >= 0, got {self.t}")
        if self.trials < 1:
            errors.append(f"trials must be >= 1, got {self.trials}")
        errors.extend(self.step_law.validation_errors())
        errors.extend(self.initial_law.validation_errors())
        return errors

    def to_dict(self) -> Dict[str, Any]:
        """Convert to dictionary."""
        return {
            "n": self.n,
            "k": self.k,
            "t": self.t,
            "step_law": self.step_law.to_dict(),
            "initial_law": self.initial_law.to_dict(),
            "seed": self.seed,
            "trials": self.trials,
            "discretization": self.discretization.value,
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "WalkConfig":
        """Create from dictionary."""
        return cls(
            n=data["n"],
            k=data["k"],
            t=data["t"],
            step_law=StepLaw.from_dict(data["step_law"]),
            initial_law=InitialLaw.from_dict(data["initial_law"]),
            seed=data.get("seed", 0),
            trials=data.get("trials", 1),
            discretization=Discretization(data.get("discretization", "quantile")),
        )


@dataclass
class ESD:
    """Eigenvalues pooled over trials, trial-major."""
    eigenvalues: npt.NDArray[np.complex128]
    n: int
    trials: int

    def __len__(self) -> int:
        return int(len(self.eigenvalues))

    @property
    def moduli(self) -> npt.NDArray[np.float64]:
        """|lambda| of every pooled eigenvalue."""
        return np.abs(self.eigenvalues)

    @property
    def mean_modulus(self) -> float:
        """Average |lambda|."""
        return float(np.mean(self.moduli))

    def trial(self, index: int) -> npt.NDArray[np.complex128]:
        """Eigenvalues of one trial."""
        return self.eigenvalues[index * self.n:(index + 1) * self.n]

    def rows(self) -> List[Tuple[int, int, float, float]]:
        """(trial, index, re, im) rows."""
        return [
            (position // self.n, position % self.n, float(value.real), float(value.imag))
            for position, value in enumerate(self.eigenvalues)
        ]


@dataclass
class Partition:
    """Time partition 0 = t_0 < ... < t_m = T."""
    times: List[float]

    @classmethod
    def uniform(cls, horizon: float, steps: int) -> "Partition":
        """Equally spaced partition with the given number of steps."""
        return cls(times=[horizon * j / steps for j in range(steps + 1)])

    @property
    def horizon(self) -> float:
        """Final time T."""
        return self.times[-1]

    @property
    def steps(self) -> int:
        """Number of subintervals."""
        return len(self.times) - 1

    @property
    def gaps(self) -> npt.NDArray[np.float64]:
        """Consecutive differences."""
        return np.diff(np.asarray(self.times, dtype=np.float64))

    @property
    def mesh(self) -> float:
        """Largest gap."""
        return float(np.max(self.gaps))

    def validation_errors(self) -> List[str]:
        """Return the list of violated invariants (empty when valid)."""
        errors: List[str] = []
        if len(self.times) < 2:
            errors.append("partition needs at least two points")
            return errors
        if self.times[0] != 0.0:
            errors.append(f"partition must start at 0, got {self.times[0]}")
        if np.any(self.gaps <= 0.0):
            errors.append("partition times must be strictly increasing")
        return errors

    def to_dict(self) -> Dict[str, Any]:
        """Convert to dictionary."""
        return {"times": list(self.times), "mesh": self.mesh}


@dataclass
class WzReport:
    """Wong-Zakai error estimates per mesh and the fitted rate."""
    meshes: List[float]
    lp_errors: List[float]
    fitted_slope: float
    p: float
    slope_ci: Tuple[float, float]
    reference_mesh: float
    trials: int
    n: int
    horizon: float

    def rows(self) -> List[Tuple[float, float]]:
        """(mesh, lp_error) rows."""
        return list(zip(self.meshes, self.lp_errors))

    def to_dict(self) -> Dict[str, Any]:
        """Convert to dictionary."""
        return {
            "meshes": self.meshes,
            "lp_errors": self.lp_errors,
            "fitted_slope": self.fitted_slope,
            "p": self.p,
            "slope_ci": list(self.slope_ci),
            "reference_mesh": self.reference_mesh,
            "trials": self.trials,
            "n": self.n,
            "horizon": self.horizon,
        }


@dataclass
class SigmaMinTable:
    """Exceedance fractions of sigma_min(U0 B_k(t) - z) per dimension."""
    z: complex
    epsilons: List[float]
    dimensions: List[int]
    exceedance: List[List[float]]  # [dimension][epsilon]
    medians: List[float]
    quantiles: List[Tuple[float, float, float]]  # 10%, 50%, 90% per dimension
    gamma: Optional[float] = None  # median ~ N^{-gamma}

    def rows(self) -> List[Tuple[int, float, float]]:
        """(n, epsilon, fraction) rows."""
        return [
            (n, eps, fraction)
            for n, fractions in zip(self.dimensions, self.exceedance)
            for eps, fraction in zip(self.epsilons, fractions)
        ]

    def to_dict(self) -> Dict[str, Any]:
        """Convert to dictionary."""
        return {
            "z": [self.z.real, self.z.imag],
            "epsilons": self.epsilons,
            "dimensions": self.dimensions,
            "exceedance": self.exceedance,
            "medians": self.medians,
            "quantiles": [list(q) for q in self.quantiles],
            "gamma": self.gamma,
        }

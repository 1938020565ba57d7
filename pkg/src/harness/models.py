"""
Harness Models.

Provides the experiment description and run bookkeeping including:
- Pydantic spec models parsed from JSON (unknown keys rejected)
- Conversions from spec sections to domain objects
- Run manifests with checksums and the configuration fingerprint
"""

from dataclasses import dataclass, field
from enum import Enum
from importlib.metadata import PackageNotFoundError, version
from typing import Any, Dict, List, Literal, Optional, Tuple, Union

from pydantic import BaseModel, Field, model_validator

from src.ensembles import Discretization, SingularLaw
from src.geometry import InitialLaw
from src.subordination import StepKind, StepLaw
from src.walk import WalkConfig


FORMAT_VERSION = 1

try:
    LIBRARY_VERSION = version("limabean")
except PackageNotFoundError:
    LIBRARY_VERSION = "0.1.0"


class CommandName(str, Enum):
    """CLI commands."""
    SAMPLE_ESD = "sample-esd"
    DENSITY_GRID = "density-grid"
    DOMAIN = "domain"
    COMPARE = "compare"
    WZ_CONVERGENCE = "wz-convergence"
    SIGMA_MIN = "sigma-min"
    K2_ORACLE = "k2-oracle"
    LIMABEAN = "limabean"


# Spec sections

class SingularLawSpec(BaseModel):
    """Atomic singular-value law."""
    values: List[float] = Field(min_length=1, description="Atoms sigma_i >= 0")
    weights: List[float] = Field(min_length=1, description="Atom weights")
    normalized: bool = Field(default=True, description="Require sum w sigma^2 = 1")

    model_config = {"extra": "forbid"}

    def to_domain(self) -> SingularLaw:
        """Build the domain law."""
        return SingularLaw(values=self.values, weights=self.weights, normalized=self.normalized)


class StepLawSpec(BaseModel):
    """Step distribution of the walk."""
    kind: StepKind = Field(description="haar | circular | atomic")
    singular: Optional[SingularLawSpec] = Field(default=None, description="Atomic law")

    model_config = {"extra": "forbid"}

    def to_domain(self) -> StepLaw:
        """Build the domain step law."""
        return StepLaw(
            kind=self.kind,
            singular=self.singular.to_domain() if self.singular else None,
        )


class InitialLawSpec(BaseModel):
    """Atomic spectral law of u0."""
    angles: List[float] = Field(default_factory=lambda: [0.0], min_length=1)
    weights: List[float] = Field(default_factory=lambda: [1.0], min_length=1)

    model_config = {"extra": "forbid"}

    def to_domain(self) -> InitialLaw:
        """Build the domain law."""
        return InitialLaw(angles=self.angles, weights=self.weights)


class WalkSpec(BaseModel):
    """Walk parameters shared by the simulation and theory commands."""
    n: int = Field(default=100, ge=1, description="Matrix dimension")
    k: Union[int, Literal["infinity"]] = Field(default=1, description="Steps, or 'infinity'")
    t: float = Field(default=1.0, ge=0.0, description="Time")
    step_law: StepLawSpec = Field(default_factory=lambda: StepLawSpec(kind=StepKind.CIRCULAR))
    initial_law: InitialLawSpec = Field(default_factory=InitialLawSpec)
    seed: int = Field(default=0, ge=0)
    trials: int = Field(default=1, ge=1)
    discretization: Discretization = Field(default=Discretization.QUANTILE)

    model_config = {"extra": "forbid"}

    @model_validator(mode="after")
    def check_laws(self) -> "WalkSpec":
        """Reject step and initial laws that violate their invariants."""
        if isinstance(self.k, int) and self.k < 1:
            raise ValueError(f"k must be >= 1, got {self.k}")
        errors = self.step_law.to_domain().validation_errors()
        errors += self.initial_law.to_domain().validation_errors()
        if errors:
            raise ValueError("; ".join(errors))
        return self

    @property
    def steps(self) -> Optional[int]:
        """Step count, None for k = infinity."""
        return None if self.k == "infinity" else int(self.k)

    def to_config(self, seed: Optional[int] = None) -> WalkConfig:
        """Build the walk configuration (finite k only)."""
        steps = self.steps
        if steps is None:
            raise ValueError("Walk simulation needs a finite k")
        return WalkConfig(
            n=self.n,
            k=steps,
            t=self.t,
            step_law=self.step_law.to_domain(),
            initial_law=self.initial_law.to_domain(),
            seed=self.seed if seed is None else seed,
            trials=self.trials,
            discretization=self.discretization,
        )


class GridSpec(BaseModel):
    """Density grid resolution."""
    resolution: int = Field(default=64, ge=16, description="Angles and radii per slice")
    n_angles: int = Field(default=1024, ge=8, description="Boundary slices for domain output")

    model_config = {"extra": "forbid"}


class CompareSpec(BaseModel):
    """Acceptance tolerances for simulation against theory."""
    epsilon: float = Field(default=0.05, gt=0.0, description="Support dilation")
    sectors: int = Field(default=8, ge=2, description="Radial and angular sector count")
    max_w1: float = Field(default=0.02, gt=0.0)
    max_z_score: float = Field(default=4.0, gt=0.0)
    max_outside_fraction: float = Field(default=0.01, ge=0.0)

    model_config = {"extra": "forbid"}


class WzSpec(BaseModel):
    """Wong-Zakai convergence experiment."""
    n: int = Field(default=8, ge=1)
    horizon: float = Field(default=1.0, gt=0.0)
    p: float = Field(default=2.0, ge=2.0)
    meshes: List[float] = Field(default_factory=lambda: [0.25, 0.125, 0.0625, 0.03125])
    trials: int = Field(default=200, ge=1)
    reference_ratio: int = Field(default=8, ge=8)
    slope_range: Tuple[float, float] = Field(default=(0.8, 1.2))

    model_config = {"extra": "forbid"}


class SigmaMinSpec(BaseModel):
    """Shifted smallest-singular-value experiment."""
    z: Tuple[float, float] = Field(default=(0.5, 0.0), description="Shift as (re, im)")
    epsilons: List[float] = Field(default_factory=lambda: [1e-4, 1e-3, 1e-2, 1e-1])
    dimensions: List[int] = Field(default_factory=lambda: [32, 64, 128, 256])
    max_gamma: float = Field(default=3.0, gt=0.0)

    model_config = {"extra": "forbid"}


class OracleSpec(BaseModel):
    """Generic pipeline against the k = 2 closed forms."""
    n_r: int = Field(default=40, ge=2)
    n_theta: int = Field(default=40, ge=2)
    margin: float = Field(default=0.1, gt=0.0, lt=0.5)
    haar_times: List[float] = Field(default_factory=lambda: [3.0])
    circular_times: List[float] = Field(default_factory=lambda: [1.0, 2.0])
    tolerance: float = Field(default=1e-5, gt=0.0)

    model_config = {"extra": "forbid"}


class LimaBeanSpec(BaseModel):
    """Convergence of Sigma_k and rho_k to the k = infinity limit."""
    ks: List[int] = Field(default_factory=lambda: [4, 8, 16, 32], min_length=2)
    n_angles: int = Field(default=1024, ge=8)
    n_r: int = Field(default=12, ge=2)
    n_theta: int = Field(default=12, ge=2)
    margin: float = Field(default=0.15, gt=0.0, lt=0.5)
    max_final_ratio: float = Field(default=0.25, gt=0.0)

    model_config = {"extra": "forbid"}


class ExperimentSpec(BaseModel):
    """A single experiment, as read from a JSON spec file."""
    command: CommandName
    format_version: int = Field(default=FORMAT_VERSION, ge=1, le=FORMAT_VERSION)
    walk: WalkSpec = Field(default_factory=WalkSpec)
    grid: GridSpec = Field(default_factory=GridSpec)
    compare: CompareSpec = Field(default_factory=CompareSpec)
    wz: WzSpec = Field(default_factory=WzSpec)
    sigma_min: SigmaMinSpec = Field(default_factory=SigmaMinSpec)
    oracle: OracleSpec = Field(default_factory=OracleSpec)
    limabean: LimaBeanSpec = Field(default_factory=LimaBeanSpec)
    output_dir: Optional[str] = Field(default=None)

    model_config = {"extra": "forbid"}


def configuration_fingerprint(walk: WalkSpec) -> Dict[str, Any]:
    """(k, t, step law, initial law) used to refuse mismatched comparisons."""
    return {
        "k": walk.k,
        "t": walk.t,
        "step_law": walk.step_law.model_dump(mode="json"),
        "initial_law": walk.initial_law.model_dump(mode="json"),
    }


@dataclass
class RunManifest:
    """Provenance of one command's output directory."""
    command: str
    spec_hash: str
    seed: int
    version: str = LIBRARY_VERSION
    wall_time_seconds: float = 0.0
    files: Dict[str, str] = field(default_factory=dict)  # name -> sha256
    configuration: Dict[str, Any] = field(default_factory=dict)
    summary: Dict[str, Any] = field(default_factory=dict)
    format_version: int = FORMAT_VERSION

    def to_dict(self) -> Dict[str, Any]:
        """Convert to dictionary."""
        return {
            "command": self.command,
            "spec_hash": self.spec_hash,
            "seed": self.seed,
            "version": self.version,
            "wall_time_seconds": self.wall_time_seconds,
            "files": dict(self.files),
            "configuration": self.configuration,
            "summary": self.summary,
            "format_version": self.format_version,
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "RunManifest":
        """Create from dictionary."""
        return cls(
            command=data["command"],
            spec_hash=data["spec_hash"],
            seed=data["seed"],
            version=data.get("version", LIBRARY_VERSION),
            wall_time_seconds=data.get("wall_time_seconds", 0.0),
            files=data.get("files", {}),
            configuration=data.get("configuration", {}),
            summary=data.get("summary", {}),
            format_version=data.get("format_version", FORMAT_VERSION),
        )


@dataclass
class CommandOutcome:
    """Result of running one command."""
    files: List[str]
    passed: bool = True
    summary: Dict[str, Any] = field(default_factory=dict)

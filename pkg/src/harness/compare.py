"""
Simulation vs Theory Comparison.

Provides the metrics behind the compare command including:
- Reading esd.csv and density.csv back into arrays and grids
- Wasserstein-1 distance between radial marginals
- Polar sector z-scores under multinomial sampling
- Fraction of eigenvalues outside the dilated support
"""

from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple

import numpy as np
import numpy.typing as npt
import structlog
from scipy.stats import wasserstein_distance

from src.density import DensityGrid
from src.geometry import InitialLaw, StepLawSummary, dilated_support_contains

from .io import ConfigMismatchError, InvalidSpecError, read_csv, read_manifest
from .models import RunManifest


logger = structlog.get_logger()

MIN_EXPECTED_COUNT = 5.0
FOOTER_LABEL = "mass"


@dataclass
class SectorTest:
    """Per-sector z-scores of eigenvalue counts against density integrals."""
    radial_edges: List[float]
    angular_edges: List[float]
    z_scores: List[List[Optional[float]]]  # None where N p < 5
    skipped: int = 0

    @property
    def max_abs(self) -> float:
        """Largest |z| over tested sectors."""
        scores = [abs(z) for row in self.z_scores for z in row if z is not None]
        return max(scores) if scores else 0.0

    def to_dict(self) -> Dict[str, Any]:
        """Convert to dictionary."""
        return {
            "radial_edges": self.radial_edges,
            "angular_edges": self.angular_edges,
            "z_scores": self.z_scores,
            "skipped": self.skipped,
            "max_abs": self.max_abs,
        }


@dataclass
class ComparisonReport:
    """Metrics of one ESD against one density grid."""
    eigenvalues: int
    w1_radial: float
    sectors: SectorTest
    outside_fraction: float
    epsilon: float
    failures: List[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        """True when no tolerance was breached."""
        return not self.failures

    def to_dict(self) -> Dict[str, Any]:
        """Convert to dictionary."""
        return {
            "eigenvalues": self.eigenvalues,
            "w1_radial": self.w1_radial,
            "sectors": self.sectors.to_dict(),
            "outside_fraction": self.outside_fraction,
            "epsilon": self.epsilon,
            "failures": self.failures,
            "passed": self.passed,
        }


def read_esd_csv(path: Path) -> npt.NDArray[np.complex128]:
    """Eigenvalues from an esd.csv file, in file order."""
    rows = read_csv(path)
    try:
        values = [complex(float(row["re"]), float(row["im"])) for row in rows]
    except (KeyError, ValueError) as e:
        raise InvalidSpecError(f"Malformed ESD file {path}: {e}") from e
    return np.asarray(values, dtype=np.complex128)


def read_density_csv(path: Path, k: Optional[int], t: float) -> DensityGrid:
    """Density grid from a density.csv file; the mass footer row is skipped."""
    rows = [row for row in read_csv(path) if row.get("r") != FOOTER_LABEL]
    try:
        r = np.asarray([float(row["r"]) for row in rows], dtype=np.float64)
        theta = np.asarray([float(row["theta"]) for row in rows], dtype=np.float64)
        values = np.asarray([float(row["density"]) for row in rows], dtype=np.float64)
        masked = np.asarray([row["masked"] == "1" for row in rows], dtype=bool)
    except (KeyError, ValueError) as e:
        raise InvalidSpecError(f"Malformed density file {path}: {e}") from e
    return DensityGrid.from_polar_cells(k, t, r, theta, values, masked)


def radial_wasserstein(
    moduli: npt.NDArray[np.float64],
    radii: npt.NDArray[np.float64],
    probabilities: npt.NDArray[np.float64],
) -> float:
    """W1 between the empirical |lambda| law and a weighted radial law."""
    if len(moduli) == 0 or len(radii) == 0:
        raise InvalidSpecError("Wasserstein distance needs nonempty samples")
    return float(wasserstein_distance(moduli, radii, v_weights=probabilities))


def sector_z_scores(
    eigenvalues: npt.NDArray[np.complex128],
    grid: DensityGrid,
    sectors: int = 8,
) -> SectorTest:
    """
    Compare eigenvalue counts per polar sector with the density integrals.

    Radial edges split [0, r_max] evenly, r_max covering both the grid and
    the eigenvalues; angular edges split [-pi, pi]. Sectors with expected
    count below 5 are skipped.
    """
    total = len(eigenvalues)
    moduli = np.abs(eigenvalues)
    r_max = float(max(np.max(grid.r), np.max(moduli))) * (1.0 + 1e-9)
    radial_edges = np.linspace(0.0, r_max, sectors + 1)
    angular_edges = np.linspace(-np.pi, np.pi, sectors + 1)

    probabilities = grid.sector_masses(radial_edges, angular_edges)
    counts, _, _ = np.histogram2d(
        moduli,
        np.angle(eigenvalues),
        bins=[radial_edges, angular_edges],
    )

    z_scores: List[List[Optional[float]]] = []
    skipped = 0
    for count_row, p_row in zip(counts, probabilities):
        scores: List[Optional[float]] = []
        for count, p in zip(count_row, p_row):
            expected = total * p
            if expected < MIN_EXPECTED_COUNT or p >= 1.0:
                scores.append(None)
                skipped += 1
                continue
            scores.append(float((count - expected) / np.sqrt(expected * (1.0 - p))))
        z_scores.append(scores)

    return SectorTest(
        radial_edges=[float(e) for e in radial_edges],
        angular_edges=[float(e) for e in angular_edges],
        z_scores=z_scores,
        skipped=skipped,
    )


def outside_fraction(
    eigenvalues: npt.NDArray[np.complex128],
    law: InitialLaw,
    k: Optional[int],
    t: float,
    eps: float,
    summary: Optional[StepLawSummary] = None,
) -> float:
    """Fraction of eigenvalues outside the eps-dilated closed support."""
    if len(eigenvalues) == 0:
        return 0.0
    outside = sum(
        1
        for value in eigenvalues
        if not dilated_support_contains(law, k, t, complex(value), eps, summary)
    )
    return outside / len(eigenvalues)


def check_configurations(
    expected: Dict[str, Any],
    manifests: List[Tuple[Path, RunManifest]],
) -> None:
    """Refuse inputs whose manifest configuration differs from the expected one."""
    for directory, manifest in manifests:
        if manifest.configuration != expected:
            raise ConfigMismatchError(
                f"Run in {directory} used {manifest.configuration}, expected {expected}"
            )


def compare_runs(
    esd_path: Path,
    density_path: Path,
    expected_configuration: Dict[str, Any],
    law: InitialLaw,
    k: Optional[int],
    t: float,
    summary: StepLawSummary,
    epsilon: float = 0.05,
    sectors: int = 8,
) -> ComparisonReport:
    """
    Compute the radial W1, sector z-scores and outside-support fraction.

    Both inputs must sit next to a manifest.json whose configuration matches
    the expected (k, t, step law, initial law).
    """
    check_configurations(
        expected_configuration,
        [
            (esd_path.parent, read_manifest(esd_path.parent)),
            (density_path.parent, read_manifest(density_path.parent)),
        ],
    )
    eigenvalues = read_esd_csv(esd_path)
    grid = read_density_csv(density_path, k, t)
    if len(eigenvalues) == 0 or grid.size == 0:
        raise InvalidSpecError("Comparison needs a nonempty ESD and density grid")

    radii, probabilities = grid.radial_marginal()
    report = ComparisonReport(
        eigenvalues=len(eigenvalues),
        w1_radial=radial_wasserstein(np.abs(eigenvalues), radii, probabilities),
        sectors=sector_z_scores(eigenvalues, grid, sectors),
        outside_fraction=outside_fraction(eigenvalues, law, k, t, epsilon, summary),
        epsilon=epsilon,
    )
    logger.info(
        "comparison_finished",
        w1=report.w1_radial,
        max_z=report.sectors.max_abs,
        outside=report.outside_fraction,
    )
    return report

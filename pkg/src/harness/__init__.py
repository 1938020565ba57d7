"""
Experiment Harness Module.

Provides spec-driven, reproducible experiment runs including:
- Pydantic experiment specs and run manifests
- CSV/JSON output with checksums
- Simulation-vs-theory comparison metrics
- The runner behind every CLI command

Usage:
    from pathlib import Path
    from src.harness import ExperimentRunner, load_spec

    spec = load_spec(Path("specs/sample_esd.json"))
    manifest = ExperimentRunner(threads=4).run(spec, Path("out/esd"))
"""

from src.harness.models import (
    FORMAT_VERSION,
    LIBRARY_VERSION,
    CommandName,
    SingularLawSpec,
    StepLawSpec,
    InitialLawSpec,
    WalkSpec,
    GridSpec,
    CompareSpec,
    WzSpec,
    SigmaMinSpec,
    OracleSpec,
    LimaBeanSpec,
    ExperimentSpec,
    RunManifest,
    CommandOutcome,
    configuration_fingerprint,
)

from src.harness.io import (
    MANIFEST_NAME,
    HarnessError,
    InvalidSpecError,
    ConfigMismatchError,
    ToleranceBreachError,
    format_cell,
    write_csv,
    read_csv,
    write_json,
    read_json,
    file_checksum,
    spec_hash,
    parse_spec,
    load_spec,
    dump_spec,
    write_manifest,
    read_manifest,
)

from src.harness.compare import (
    SectorTest,
    ComparisonReport,
    read_esd_csv,
    read_density_csv,
    radial_wasserstein,
    sector_z_scores,
    outside_fraction,
    check_configurations,
    compare_runs,
)

from src.harness.commands import (
    ExperimentRunner,
    is_strictly_decreasing,
)

__all__ = [
    # Models
    "FORMAT_VERSION",
    "LIBRARY_VERSION",
    "CommandName",
    "SingularLawSpec",
    "StepLawSpec",
    "InitialLawSpec",
    "WalkSpec",
    "GridSpec",
    "CompareSpec",
    "WzSpec",
    "SigmaMinSpec",
    "OracleSpec",
    "LimaBeanSpec",
    "ExperimentSpec",
    "RunManifest",
    "CommandOutcome",
    "configuration_fingerprint",
    # I/O
    "MANIFEST_NAME",
    "HarnessError",
    "InvalidSpecError",
    "ConfigMismatchError",
    "ToleranceBreachError",
    "format_cell",
    "write_csv",
    "read_csv",
    "write_json",
    "read_json",
    "file_checksum",
    "spec_hash",
    "parse_spec",
    "load_spec",
    "dump_spec",
    "write_manifest",
    "read_manifest",
    # Comparison
    "SectorTest",
    "ComparisonReport",
    "read_esd_csv",
    "read_density_csv",
    "radial_wasserstein",
    "sector_z_scores",
    "outside_fraction",
    "check_configurations",
    "compare_runs",
    # Runner
    "ExperimentRunner",
    "is_strictly_decreasing",
]

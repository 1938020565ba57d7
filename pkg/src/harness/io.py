"""
Harness I/O.

Provides file handling for experiment runs including:
- Spec loading with validation (orjson + pydantic)
- CSV writing with explicit headers and 17-significant-digit floats
- Canonical JSON writing and sha256 checksums
- Manifest reading and writing
"""

import csv
import hashlib
from pathlib import Path
from typing import Any, Dict, Iterable, List, Sequence

import orjson
import structlog
from pydantic import ValidationError

from .models import ExperimentSpec, RunManifest


logger = structlog.get_logger()

MANIFEST_NAME = "manifest.json"
JSON_OPTIONS = orjson.OPT_INDENT_2 | orjson.OPT_SORT_KEYS | orjson.OPT_SERIALIZE_NUMPY


class HarnessError(Exception):
    """Base harness error."""
    pass


class InvalidSpecError(HarnessError):
    """Spec file is missing, malformed or fails validation."""
    pass


class ConfigMismatchError(HarnessError):
    """Compared runs were produced from different configurations."""
    pass


class ToleranceBreachError(HarnessError):
    """An acceptance tolerance was exceeded."""

    def __init__(self, message: str, failures: List[str]):
        super().__init__(message)
        self.failures = failures


def format_cell(value: Any) -> str:
    """Floats with 17 significant digits, booleans as 0/1, None as empty."""
    if value is None:
        return ""
    if isinstance(value, bool):
        return "1" if value else "0"
    if isinstance(value, float):
        return format(value, ".17g")
    return str(value)


def write_csv(
    path: Path,
    header: Sequence[str],
    rows: Iterable[Sequence[Any]],
) -> None:
    """Write a CSV with an explicit header and "\\n" line endings."""
    with path.open("w", newline="") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([format_cell(value) for value in row])


def read_csv(path: Path) -> List[Dict[str, str]]:
    """Read a CSV into dictionaries keyed by the header."""
    try:
        with path.open(newline="") as handle:
            return list(csv.DictReader(handle))
    except OSError as e:
        raise InvalidSpecError(f"Cannot read {path}: {e}") from e


def write_json(path: Path, payload: Any) -> None:
    """Write canonical JSON (indented, sorted keys)."""
    path.write_bytes(orjson.dumps(payload, option=JSON_OPTIONS) + b"\n")


def read_json(path: Path) -> Any:
    """Read JSON, mapping I/O and syntax failures to InvalidSpecError."""
    try:
        return orjson.loads(path.read_bytes())
    except OSError as e:
        raise InvalidSpecError(f"Cannot read {path}: {e}") from e
    except orjson.JSONDecodeError as e:
        raise InvalidSpecError(f"Malformed JSON in {path}: {e}") from e


def file_checksum(path: Path) -> str:
    """sha256 hex digest of a file."""
    return hashlib.sha256(path.read_bytes()).hexdigest()


def spec_hash(spec: ExperimentSpec) -> str:
    """sha256 of the canonical JSON of the fully-defaulted spec."""
    canonical = orjson.dumps(spec.model_dump(mode="json"), option=orjson.OPT_SORT_KEYS)
    return hashlib.sha256(canonical).hexdigest()


def parse_spec(data: Any) -> ExperimentSpec:
    """Validate decoded JSON as an ExperimentSpec."""
    try:
        return ExperimentSpec.model_validate(data)
    except ValidationError as e:
        raise InvalidSpecError(f"Invalid spec: {e}") from e


def load_spec(path: Path) -> ExperimentSpec:
    """Read and validate a spec file."""
    spec = parse_spec(read_json(path))
    logger.debug("spec_loaded", path=str(path), command=spec.command.value)
    return spec


def dump_spec(spec: ExperimentSpec) -> Dict[str, Any]:
    """Serialize a spec to the fields that were set explicitly."""
    payload: Dict[str, Any] = spec.model_dump(mode="json", exclude_unset=True)
    return payload


def write_manifest(directory: Path, manifest: RunManifest) -> Path:
    """Write manifest.json into the output directory."""
    path = directory / MANIFEST_NAME
    write_json(path, manifest.to_dict())
    return path


def read_manifest(directory: Path) -> RunManifest:
    """Read manifest.json from a directory."""
    path = directory / MANIFEST_NAME
    if not path.exists():
        raise InvalidSpecError(f"No {MANIFEST_NAME} in {directory}")
    data = read_json(path)
    try:
        return RunManifest.from_dict(data)
    except (KeyError, TypeError) as e:
        raise InvalidSpecError(f"Malformed manifest in {directory}: {e}") from e

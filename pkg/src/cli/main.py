"""
Command-Line Interface.

Provides the limabean console script:

    limabean <command> --spec <file.json> --out <dir> [--seed N] [--threads N]

Exit codes: 0 success, 1 tolerance breach, 2 invalid input, 3 numeric failure.
"""

from pathlib import Path
from typing import Callable, Dict, Optional

import structlog
import typer
from rich.console import Console

from src.density import DensityError
from src.ensembles import EnsembleError, InvalidDimensionError, InvalidLawError
from src.geometry import GeometryError
from src.harness import (
    LIBRARY_VERSION,
    CommandName,
    ConfigMismatchError,
    ExperimentRunner,
    InvalidSpecError,
    ToleranceBreachError,
    load_spec,
)
from src.logging_config import configure_logging
from src.settings import get_settings, set_settings
from src.subordination import SubordinationError
from src.walk import InvalidWalkConfigError, WalkError


logger = structlog.get_logger()

EXIT_BREACH = 1
EXIT_INVALID = 2
EXIT_NUMERIC = 3

INVALID_INPUT_ERRORS = (
    InvalidSpecError,
    ConfigMismatchError,
    InvalidWalkConfigError,
    InvalidDimensionError,
    InvalidLawError,
)
NUMERIC_ERRORS = (
    EnsembleError,
    GeometryError,
    SubordinationError,
    DensityError,
    WalkError,
    ArithmeticError,
    ValueError,
)

app = typer.Typer(
    name="limabean",
    help="Brown-measure experiments for matrix random walks.",
    no_args_is_help=True,
    add_completion=False,
)
console = Console()
error_console = Console(stderr=True)

SpecOption = typer.Option(..., "--spec", help="Experiment spec (JSON)")
OutOption = typer.Option(None, "--out", help="Output directory (defaults to spec output_dir)")
SeedOption = typer.Option(None, "--seed", help="Override the spec seed")
ThreadsOption = typer.Option(None, "--threads", min=1, help="Worker threads")
EsdOption = typer.Option(..., "--esd", help="esd.csv from sample-esd")
DensityOption = typer.Option(..., "--density", help="density.csv from density-grid")


def _show_version(value: bool) -> None:
    if value:
        console.print(f"limabean {LIBRARY_VERSION}")
        raise typer.Exit()


VersionOption = typer.Option(
    False,
    "--version",
    callback=_show_version,
    is_eager=True,
    help="Show the version and exit.",
)


@app.callback()
def main(version: bool = VersionOption) -> None:
    """Run one experiment and write its CSV/JSON outputs plus manifest.json."""
    settings = get_settings()
    configure_logging(settings.log_level, settings.json_logs)


def _execute(
    command: CommandName,
    spec_path: Path,
    out: Optional[Path],
    seed: Optional[int],
    threads: Optional[int],
    inputs: Optional[Dict[str, Path]] = None,
) -> None:
    """Load, run and map failures onto the exit-code contract."""
    if threads is not None:
        set_settings(get_settings().model_copy(update={"threads": threads}))
    try:
        spec = load_spec(spec_path)
        if spec.command != command:
            raise InvalidSpecError(
                f"Spec is for '{spec.command.value}', not '{command.value}'"
            )
        if seed is not None:
            spec = spec.model_copy(update={"walk": spec.walk.model_copy(update={"seed": seed})})
        logger.info("cli_command_started", command=command.value, spec=str(spec_path))
        manifest = ExperimentRunner(threads=threads).run(spec, out, inputs)
    except ToleranceBreachError as e:
        error_console.print(f"[red]Tolerance breach:[/red] {e}")
        raise typer.Exit(code=EXIT_BREACH) from e
    except INVALID_INPUT_ERRORS as e:
        error_console.print(f"[red]Invalid input:[/red] {e}")
        raise typer.Exit(code=EXIT_INVALID) from e
    except NUMERIC_ERRORS as e:
        error_console.print(f"[red]Numeric failure:[/red] {e}")
        raise typer.Exit(code=EXIT_NUMERIC) from e
    except OSError as e:
        error_console.print(f"[red]I/O error:[/red] {e}")
        raise typer.Exit(code=EXIT_INVALID) from e

    for name, checksum in manifest.files.items():
        console.print(f"{name}  {checksum}")


def _command(name: CommandName) -> Callable[..., None]:
    def run(
        spec: Path = SpecOption,
        out: Optional[Path] = OutOption,
        seed: Optional[int] = SeedOption,
        threads: Optional[int] = ThreadsOption,
    ) -> None:
        _execute(name, spec, out, seed, threads)

    run.__doc__ = f"Run the {name.value} experiment."
    return run


for _name in (
    CommandName.SAMPLE_ESD,
    CommandName.DENSITY_GRID,
    CommandName.DOMAIN,
    CommandName.WZ_CONVERGENCE,
    CommandName.SIGMA_MIN,
    CommandName.K2_ORACLE,
    CommandName.LIMABEAN,
):
    app.command(name=_name.value)(_command(_name))


@app.command(name=CommandName.COMPARE.value)
def compare(
    spec: Path = SpecOption,
    esd: Path = EsdOption,
    density: Path = DensityOption,
    out: Optional[Path] = OutOption,
    seed: Optional[int] = SeedOption,
    threads: Optional[int] = ThreadsOption,
) -> None:
    """Compare a simulated ESD with a theoretical density grid."""
    _execute(
        CommandName.COMPARE,
        spec,
        out,
        seed,
        threads,
        inputs={"esd": esd, "density": density},
    )


if __name__ == "__main__":
    app()

"""
Experiment Runner.

Provides execution of every CLI command including:
- Dispatch from ExperimentSpec.command to the command implementation
- Ordered, single-threaded writing of CSV/JSON outputs
- manifest.json with spec hash, seed, version, wall time and checksums
- Acceptance checks that raise ToleranceBreachError after outputs are written
"""

import math
import time
from concurrent.futures import ThreadPoolExecutor
from functools import partial
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional

import numpy as np
import structlog

from src.density import (
    BrownDensity,
    DensityError,
    build_density_grid,
    density_k2_circular,
    density_k2_haar,
    get_density_service,
    interior_nodes,
)
from src.ensembles import RngStream
from src.geometry import (
    InitialLaw,
    angular_interval,
    boundary_points,
    boundary_radii,
    classify_phase,
    hausdorff_distance,
    lifetime_infinity,
    sigma_infinity_boundary,
    sigma_k_contains,
)
from src.settings import get_settings
from src.subordination import StepLaw, SubordinationError
from src.walk import pooled_esd, sigma_min_shifted_experiment, wz_convergence_experiment

from .compare import compare_runs
from .io import (
    InvalidSpecError,
    ToleranceBreachError,
    file_checksum,
    spec_hash,
    write_csv,
    write_json,
    write_manifest,
)
from .models import (
    CommandName,
    CommandOutcome,
    ExperimentSpec,
    RunManifest,
    configuration_fingerprint,
)


logger = structlog.get_logger()

CommandHandler = Callable[[ExperimentSpec, Path, Dict[str, Path]], CommandOutcome]


def is_strictly_decreasing(values: List[float]) -> bool:
    """True when every value is below its predecessor."""
    return all(b < a for a, b in zip(values, values[1:]))


class ExperimentRunner:
    """
    Runs experiment specs and writes their outputs.

    Features:
    - One output directory per run, created on demand
    - Deterministic data files (wall time lives only in the manifest)
    - Worker threads from the settings unless given explicitly
    """

    def __init__(
        self,
        threads: Optional[int] = None,
        density: Optional[BrownDensity] = None,
    ):
        self.threads = threads or get_settings().threads
        self._density = density
        self._handlers: Dict[CommandName, CommandHandler] = {
            CommandName.SAMPLE_ESD: self._sample_esd,
            CommandName.DENSITY_GRID: self._density_grid,
            CommandName.DOMAIN: self._domain,
            CommandName.COMPARE: self._compare,
            CommandName.WZ_CONVERGENCE: self._wz_convergence,
            CommandName.SIGMA_MIN: self._sigma_min,
            CommandName.K2_ORACLE: self._k2_oracle,
            CommandName.LIMABEAN: self._limabean,
        }

    @property
    def density(self) -> BrownDensity:
        """Density service in use (the global one unless injected)."""
        return self._density or get_density_service()

    def run(
        self,
        spec: ExperimentSpec,
        out_dir: Optional[Path] = None,
        inputs: Optional[Dict[str, Path]] = None,
    ) -> RunManifest:
        """
        Execute a spec and write its outputs plus manifest.json.

        Args:
            spec: Validated experiment spec.
            out_dir: Output directory (spec.output_dir when omitted).
            inputs: Input files for compare ("esd" and "density").

        Returns:
            The written manifest.

        Raises:
            InvalidSpecError: no output directory or missing inputs.
            ToleranceBreachError: an acceptance check failed; outputs are kept.
        """
        directory = out_dir or (Path(spec.output_dir) if spec.output_dir else None)
        if directory is None:
            raise InvalidSpecError("No output directory given (--out or output_dir)")
        directory.mkdir(parents=True, exist_ok=True)

        started = time.perf_counter()
        outcome = self._handlers[spec.command](spec, directory, inputs or {})
        elapsed = time.perf_counter() - started

        manifest = RunManifest(
            command=spec.command.value,
            spec_hash=spec_hash(spec),
            seed=spec.walk.seed,
            wall_time_seconds=elapsed,
            files={name: file_checksum(directory / name) for name in outcome.files},
            configuration=configuration_fingerprint(spec.walk),
            summary=outcome.summary,
        )
        write_manifest(directory, manifest)
        logger.info(
            "command_written",
            command=spec.command.value,
            out=str(directory),
            files=outcome.files,
            seconds=round(elapsed, 3),
        )

        if not outcome.passed:
            failures = list(outcome.summary.get("failures", []))
            raise ToleranceBreachError(
                f"{spec.command.value} breached its tolerances: {'; '.join(failures)}",
                failures,
            )
        return manifest

    # Inputs

    def _require_time(self, spec: ExperimentSpec) -> float:
        if not spec.walk.t > 0.0:
            raise InvalidSpecError(f"{spec.command.value} needs t > 0, got {spec.walk.t}")
        return spec.walk.t

    def _trivial_law(self, spec: ExperimentSpec) -> InitialLaw:
        law = spec.walk.initial_law.to_domain()
        if not law.is_trivial:
            raise InvalidSpecError(f"{spec.command.value} needs the trivial initial law")
        return law

    # Commands

    def _sample_esd(
        self,
        spec: ExperimentSpec,
        out: Path,
        inputs: Dict[str, Path],
    ) -> CommandOutcome:
        try:
            cfg = spec.walk.to_config()
        except ValueError as e:
            raise InvalidSpecError(str(e)) from e
        esd = pooled_esd(cfg, threads=self.threads)
        write_csv(out / "esd.csv", ["trial", "index", "re", "im"], esd.rows())
        return CommandOutcome(
            files=["esd.csv"],
            summary={"eigenvalues": len(esd), "mean_modulus": esd.mean_modulus},
        )

    def _density_grid(
        self,
        spec: ExperimentSpec,
        out: Path,
        inputs: Dict[str, Path],
    ) -> CommandOutcome:
        t = self._require_time(spec)
        grid = build_density_grid(
            spec.walk.step_law.to_domain(),
            spec.walk.initial_law.to_domain(),
            spec.walk.steps,
            t,
            spec.grid.resolution,
            service=self.density,
            threads=self.threads,
        )
        z = grid.z
        rows: List[List[Any]] = [
            [
                float(grid.r[i]),
                float(grid.theta[i]),
                float(z[i].real),
                float(z[i].imag),
                float(grid.values[i]),
                bool(grid.masked[i]),
                grid.reasons[i],
            ]
            for i in range(grid.size)
        ]
        rows.append(["mass", "", "", "", grid.mass, grid.masked_count, ""])
        write_csv(
            out / "density.csv",
            ["r", "theta", "re", "im", "density", "masked", "reason"],
            rows,
        )
        return CommandOutcome(files=["density.csv"], summary=grid.summary())

    def _domain(
        self,
        spec: ExperimentSpec,
        out: Path,
        inputs: Dict[str, Path],
    ) -> CommandOutcome:
        t = self._require_time(spec)
        law = spec.walk.initial_law.to_domain()
        k = spec.walk.steps
        step = spec.walk.step_law.to_domain()
        thetas = np.linspace(-math.pi, math.pi, spec.grid.n_angles, endpoint=False)

        rows: List[List[float]] = []
        for theta in thetas:
            if k is None:
                outer = sigma_infinity_boundary(law, t, float(theta))
                onset = lifetime_infinity(law, complex(np.exp(1j * theta)))
                inner = 1.0 / outer if outer > 1.0 else 0.0
                rows.append([float(theta), inner, 1.0, outer if outer > 1.0 else 0.0, onset])
                continue
            slice_ = boundary_radii(law, k, t, float(theta))
            rows.append(
                [slice_.theta, slice_.r_minus, slice_.r_min, slice_.r_plus, slice_.t_star]
            )
        write_csv(out / "domain.csv", ["theta", "r_minus", "r_min", "r_plus", "t_star"], rows)

        if k is None:
            phase: Dict[str, Any] = {"k": "infinity", "t": t}
            if law.is_trivial:
                phase["angular_half_width"] = angular_interval(law, None, t)
                phase["regime"] = "annulus" if t >= 4.0 else "disk"
        else:
            phase = classify_phase(k, t, step.summary, law).to_dict()
        write_json(out / "phase.json", phase)
        return CommandOutcome(files=["domain.csv", "phase.json"], summary=phase)

    def _compare(
        self,
        spec: ExperimentSpec,
        out: Path,
        inputs: Dict[str, Path],
    ) -> CommandOutcome:
        if "esd" not in inputs or "density" not in inputs:
            raise InvalidSpecError("compare needs --esd and --density inputs")
        for path in inputs.values():
            if not path.is_file():
                raise InvalidSpecError(f"Input file not found: {path}")
        t = self._require_time(spec)
        tolerances = spec.compare
        report = compare_runs(
            inputs["esd"],
            inputs["density"],
            configuration_fingerprint(spec.walk),
            spec.walk.initial_law.to_domain(),
            spec.walk.steps,
            t,
            spec.walk.step_law.to_domain().summary,
            epsilon=tolerances.epsilon,
            sectors=tolerances.sectors,
        )
        if report.w1_radial > tolerances.max_w1:
            report.failures.append(f"W1 {report.w1_radial:.4g} > {tolerances.max_w1}")
        if report.sectors.max_abs > tolerances.max_z_score:
            report.failures.append(
                f"sector |z| {report.sectors.max_abs:.3g} > {tolerances.max_z_score}"
            )
        if report.outside_fraction > tolerances.max_outside_fraction:
            report.failures.append(
                f"outside fraction {report.outside_fraction:.4g} > "
                f"{tolerances.max_outside_fraction}"
            )
        write_json(out / "report.json", report.to_dict())
        return CommandOutcome(
            files=["report.json"],
            passed=report.passed,
            summary={
                "w1_radial": report.w1_radial,
                "max_z_score": report.sectors.max_abs,
                "outside_fraction": report.outside_fraction,
                "failures": report.failures,
            },
        )

    def _wz_convergence(
        self,
        spec: ExperimentSpec,
        out: Path,
        inputs: Dict[str, Path],
    ) -> CommandOutcome:
        wz = spec.wz
        report = wz_convergence_experiment(
            wz.n,
            wz.horizon,
            wz.p,
            wz.meshes,
            wz.trials,
            rng=RngStream(seed=spec.walk.seed),
            reference_ratio=wz.reference_ratio,
            threads=self.threads,
        )
        write_csv(out / "wz.csv", ["mesh", "lp_error"], report.rows())
        low, high = wz.slope_range
        failures: List[str] = []
        if not low <= report.fitted_slope <= high:
            failures.append(f"slope {report.fitted_slope:.4g} outside [{low}, {high}]")
        payload = {**report.to_dict(), "slope_range": [low, high], "failures": failures}
        write_json(out / "slope.json", payload)
        return CommandOutcome(
            files=["wz.csv", "slope.json"],
            passed=not failures,
            summary={"fitted_slope": report.fitted_slope, "failures": failures},
        )

    def _sigma_min(
        self,
        spec: ExperimentSpec,
        out: Path,
        inputs: Dict[str, Path],
    ) -> CommandOutcome:
        try:
            cfg = spec.walk.to_config()
        except ValueError as e:
            raise InvalidSpecError(str(e)) from e
        settings = spec.sigma_min
        table = sigma_min_shifted_experiment(
            cfg,
            complex(*settings.z),
            settings.epsilons,
            settings.dimensions,
            threads=self.threads,
        )
        rows: List[List[Any]] = []
        for n, eps, fraction in table.rows():
            low, mid, high = table.quantiles[table.dimensions.index(n)]
            rows.append([n, eps, fraction, low, mid, high])
        rows.append(["gamma", "", table.gamma, "", "", ""])
        write_csv(out / "sigmin.csv", ["n", "epsilon", "fraction", "q10", "q50", "q90"], rows)

        failures: List[str] = []
        if table.gamma is not None and table.gamma > settings.max_gamma:
            failures.append(f"gamma {table.gamma:.4g} > {settings.max_gamma}")
        return CommandOutcome(
            files=["sigmin.csv"],
            passed=not failures,
            summary={"gamma": table.gamma, "medians": table.medians, "failures": failures},
        )

    def _oracle_case(
        self,
        step: StepLaw,
        t: float,
        closed_form: Callable[[float, complex], float],
        spec: ExperimentSpec,
    ) -> Dict[str, Any]:
        oracle = spec.oracle
        law = InitialLaw.trivial()
        nodes = interior_nodes(law, 2, t, oracle.n_r, oracle.n_theta, oracle.margin, step)
        generic = partial(self.density.density_k, step, law, 2, t)
        with ThreadPoolExecutor(max_workers=self.threads) as pool:
            values = list(pool.map(generic, nodes))
        errors = [abs(value - closed_form(t, z)) for value, z in zip(values, nodes)]
        return {
            "step": step.kind.value,
            "t": t,
            "grid": [oracle.n_r, oracle.n_theta],
            "points": len(nodes),
            "max_abs_error": max(errors) if errors else 0.0,
        }

    def _k2_oracle(
        self,
        spec: ExperimentSpec,
        out: Path,
        inputs: Dict[str, Path],
    ) -> CommandOutcome:
        oracle = spec.oracle
        cases = [
            self._oracle_case(StepLaw.haar(), t, density_k2_haar, spec)
            for t in oracle.haar_times
        ]
        cases += [
            self._oracle_case(StepLaw.circular(), t, density_k2_circular, spec)
            for t in oracle.circular_times
        ]
        failures = [
            f"{case['step']} t={case['t']}: {case['max_abs_error']:.3g} > {oracle.tolerance}"
            for case in cases
            if case["max_abs_error"] > oracle.tolerance
        ]
        write_json(
            out / "oracle.json",
            {"cases": cases, "tolerance": oracle.tolerance, "failures": failures},
        )
        return CommandOutcome(
            files=["oracle.json"],
            passed=not failures,
            summary={"cases": len(cases), "failures": failures},
        )

    def _shared_nodes(
        self,
        law: InitialLaw,
        t: float,
        spec: ExperimentSpec,
    ) -> List[complex]:
        settings = spec.limabean
        nodes = interior_nodes(law, None, t, settings.n_r, settings.n_theta, settings.margin)
        return [
            z for z in nodes if all(sigma_k_contains(law, k, t, z) for k in settings.ks)
        ]

    def _node_gaps(
        self,
        step: StepLaw,
        law: InitialLaw,
        t: float,
        ks: List[int],
        z: complex,
    ) -> Optional[List[float]]:
        """|rho_k - rho_inf| at one node for every k, None when any evaluation fails."""
        try:
            limit = self.density.density_infinity(law, t, z)
            return [abs(self.density.density_k(step, law, k, t, z) - limit) for k in ks]
        except (DensityError, SubordinationError) as e:
            logger.debug("limabean_node_skipped", z=str(z), error=str(e))
            return None

    def _limabean(
        self,
        spec: ExperimentSpec,
        out: Path,
        inputs: Dict[str, Path],
    ) -> CommandOutcome:
        t = self._require_time(spec)
        law = self._trivial_law(spec)
        step = spec.walk.step_law.to_domain()
        settings = spec.limabean
        ks = sorted(settings.ks)

        limit_boundary = boundary_points(law, None, t, settings.n_angles)
        distances = [
            hausdorff_distance(boundary_points(law, k, t, settings.n_angles), limit_boundary)
            for k in ks
        ]
        nodes = self._shared_nodes(law, t, spec)
        with ThreadPoolExecutor(max_workers=self.threads) as pool:
            rows = list(pool.map(partial(self._node_gaps, step, law, t, ks), nodes))
        table = [row for row in rows if row is not None]
        if not table:
            raise InvalidSpecError("No grid node lies inside every compared domain")
        gaps = [float(v) for v in np.max(np.asarray(table), axis=0)]

        write_csv(
            out / "conv.csv",
            ["k", "density_gap", "hausdorff"],
            [[k, gap, distance] for k, gap, distance in zip(ks, gaps, distances)],
        )
        density_monotone = is_strictly_decreasing(gaps)
        hausdorff_monotone = is_strictly_decreasing(distances)
        final_ratio = distances[-1] / distances[0] if distances[0] > 0.0 else 0.0
        failures: List[str] = []
        if not density_monotone:
            failures.append("density gap is not strictly decreasing in k")
        if not hausdorff_monotone:
            failures.append("Hausdorff distance is not strictly decreasing in k")
        if final_ratio > settings.max_final_ratio:
            failures.append(
                f"final Hausdorff ratio {final_ratio:.3g} > {settings.max_final_ratio}"
            )
        summary = {
            "ks": ks,
            "density_gap": gaps,
            "hausdorff": distances,
            "density_monotone": density_monotone,
            "hausdorff_monotone": hausdorff_monotone,
            "final_ratio": final_ratio,
            "nodes": len(nodes),
            "failures": failures,
        }
        write_json(out / "conv.json", summary)
        return CommandOutcome(
            files=["conv.csv", "conv.json"],
            passed=not failures,
            summary=summary,
        )

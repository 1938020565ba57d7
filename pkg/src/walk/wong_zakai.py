"""
Wong-Zakai Products.

Provides partition-indexed products (I + dW_1)(I + dW_2)... approximating
Brownian motion on GL(N, C), and the experiment measuring their rate of
convergence against a fine-mesh product on the same Gaussian path.
"""

from concurrent.futures import ThreadPoolExecutor
from typing import List, Optional

import numpy as np
import numpy.typing as npt
import structlog

from src.ensembles import RngStream, hs_norm, sample_ginibre
from src.settings import get_settings

from .models import Partition, WzReport
from .simulation import FitImpossibleError, InvalidWalkConfigError, PartitionMismatchError


logger = structlog.get_logger()

MESH_TOLERANCE = 1e-9
BOOTSTRAP_RESAMPLES = 200


def partition_increments(
    n: int,
    partition: Partition,
    rng: RngStream,
) -> npt.NDArray[np.complex128]:
    """Independent increments sqrt(ds) W with W Ginibre, one per subinterval."""
    gaps = partition.gaps
    return np.stack([np.sqrt(gap) * sample_ginibre(n, rng) for gap in gaps])


def brownian_increments(
    n: int,
    horizon: float,
    steps: int,
    rng: RngStream,
) -> npt.NDArray[np.complex128]:
    """Increments of a flat Brownian path on a uniform grid of the given size."""
    return partition_increments(n, Partition.uniform(horizon, steps), rng)


def coarsen_increments(
    fine: npt.NDArray[np.complex128],
    ratio: int,
) -> npt.NDArray[np.complex128]:
    """Sum consecutive blocks of `ratio` fine increments."""
    steps = fine.shape[0]
    if ratio < 1 or steps % ratio:
        raise PartitionMismatchError(f"Cannot coarsen {steps} increments by {ratio}")
    n = fine.shape[1]
    return np.asarray(fine.reshape(steps // ratio, ratio, n, n).sum(axis=1), dtype=np.complex128)


def _check_partition(partition: Partition, increments: npt.NDArray[np.complex128]) -> None:
    errors = partition.validation_errors()
    if errors:
        raise InvalidWalkConfigError("; ".join(errors))
    if increments.shape[0] != partition.steps:
        raise PartitionMismatchError(
            f"{increments.shape[0]} increments for a partition of {partition.steps} steps"
        )


def wong_zakai_path(
    partition: Partition,
    increments: npt.NDArray[np.complex128],
) -> npt.NDArray[np.complex128]:
    """
    Products at every partition point.

    Returns:
        Array of shape (steps + 1, n, n); entry j is
        (I + dW_1) ... (I + dW_j), entry 0 the identity.
    """
    _check_partition(partition, increments)
    n = increments.shape[1]
    identity = np.eye(n, dtype=np.complex128)
    path = np.empty((partition.steps + 1, n, n), dtype=np.complex128)
    path[0] = identity
    for j, increment in enumerate(increments, start=1):
        path[j] = path[j - 1] @ (identity + increment)
    return path


def wong_zakai_product(
    partition: Partition,
    increments: npt.NDArray[np.complex128],
    full_basis: bool = True,
) -> npt.NDArray[np.complex128]:
    """
    Product prod_s (I + dW_s) at the final time.

    Only the full matrix basis is supported, for which the Ito correction
    term vanishes.
    """
    if not full_basis:
        raise InvalidWalkConfigError("Only the full matrix basis is supported")
    return np.asarray(wong_zakai_path(partition, increments)[-1], dtype=np.complex128)


def _steps_for(horizon: float, mesh: float) -> int:
    steps = int(round(horizon / mesh))
    if steps < 1 or abs(steps * mesh - horizon) > MESH_TOLERANCE * horizon:
        raise InvalidWalkConfigError(f"Mesh {mesh} does not divide horizon {horizon}")
    return steps


def _fit_slope(meshes: npt.NDArray[np.float64], errors: npt.NDArray[np.float64]) -> float:
    return float(np.polyfit(np.log(meshes), np.log(errors), 1)[0])


def wz_convergence_experiment(
    n: int,
    horizon: float,
    p: float,
    meshes: List[float],
    trials: int,
    rng: Optional[RngStream] = None,
    reference_ratio: int = 8,
    threads: Optional[int] = None,
) -> WzReport:
    """
    Estimate E[max_j |B_mesh(t_j) - B_ref(t_j)|^p] per mesh and fit the rate.

    The reference product uses a mesh reference_ratio times finer than the
    finest tested mesh on the same Gaussian path. The maximum runs over the
    points of the coarse partition; |.| is the normalized HS norm.

    Args:
        n: Matrix dimension.
        horizon: Final time T.
        p: Moment order, >= 2.
        meshes: Tested meshes, strictly decreasing, each dividing T.
        trials: Number of independent paths.
        rng: Base stream; path i uses stream_id i.
        reference_ratio: Fine-to-finest mesh ratio, >= 8.
        threads: Worker threads.

    Returns:
        WzReport with the fitted log-log slope and a bootstrap 95% CI.
    """
    if trials < 1:
        raise InvalidWalkConfigError(f"trials must be >= 1, got {trials}")
    if p < 2:
        raise InvalidWalkConfigError(f"p must be >= 2, got {p}")
    if reference_ratio < 8:
        raise InvalidWalkConfigError(f"reference_ratio must be >= 8, got {reference_ratio}")
    if len(meshes) < 3:
        raise FitImpossibleError(f"Need at least 3 meshes for a rate fit, got {len(meshes)}")
    if any(b >= a for a, b in zip(meshes, meshes[1:])):
        raise InvalidWalkConfigError("Meshes must be strictly decreasing")

    base = rng or RngStream(seed=0)
    threads = threads or get_settings().threads
    reference_mesh = min(meshes) / reference_ratio
    fine_steps = _steps_for(horizon, reference_mesh)
    fine_partition = Partition.uniform(horizon, fine_steps)
    coarse_steps = [_steps_for(horizon, mesh) for mesh in meshes]
    for steps in coarse_steps:
        if fine_steps % steps:
            raise PartitionMismatchError(f"{steps} coarse steps do not nest in {fine_steps}")

    def path_errors(trial: int) -> List[float]:
        fine = brownian_increments(n, horizon, fine_steps, base.fork(trial))
        reference = wong_zakai_path(fine_partition, fine)
        errors: List[float] = []
        for steps in coarse_steps:
            ratio = fine_steps // steps
            coarse = wong_zakai_path(
                Partition.uniform(horizon, steps),
                coarsen_increments(fine, ratio),
            )
            gaps = [hs_norm(coarse[j] - reference[j * ratio]) for j in range(steps + 1)]
            errors.append(max(gaps) ** p)
        return errors

    with ThreadPoolExecutor(max_workers=threads) as pool:
        table = np.asarray(list(pool.map(path_errors, range(trials))), dtype=np.float64)

    mesh_array = np.asarray(meshes, dtype=np.float64)
    lp_errors = table.mean(axis=0)
    slope = _fit_slope(mesh_array, lp_errors)

    resampler = base.fork(trials).generator
    slopes: List[float] = []
    for _ in range(BOOTSTRAP_RESAMPLES):
        sample = resampler.integers(0, trials, size=trials)
        slopes.append(_fit_slope(mesh_array, table[sample].mean(axis=0)))
    low, high = np.percentile(slopes, [2.5, 97.5])

    report = WzReport(
        meshes=[float(m) for m in meshes],
        lp_errors=[float(e) for e in lp_errors],
        fitted_slope=slope,
        p=p,
        slope_ci=(float(low), float(high)),
        reference_mesh=reference_mesh,
        trials=trials,
        n=n,
        horizon=horizon,
    )
    logger.info("wz_experiment_finished", slope=slope, ci=report.slope_ci, trials=trials)
    return report

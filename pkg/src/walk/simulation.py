"""
Walk Simulation Service.

Provides Monte Carlo simulation of U0 B_k(t) including:
- Initial unitaries with a prescribed atomic spectrum
- The product U0 (I + sqrt(t/k) A_1) ... (I + sqrt(t/k) A_k)
- Pooled eigenvalues over independent trials
- The shifted smallest-singular-value experiment
"""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import replace
from functools import partial
from typing import List, Optional, Tuple

import numpy as np
import numpy.typing as npt
import structlog

from src.ensembles import (
    ComplexMatrix,
    Discretization,
    RngStream,
    SolverFailureError,
    eigenvalues,
    ensure_finite,
    sample_bi_invariant,
    sample_ginibre,
    sample_haar_unitary,
    sigma_min,
)
from src.geometry import InitialLaw
from src.settings import get_settings
from src.subordination import StepKind, StepLaw

from .models import ESD, SigmaMinTable, WalkConfig


logger = structlog.get_logger()


class WalkError(Exception):
    """Base walk error."""
    pass


class InvalidWalkConfigError(WalkError):
    """Walk or experiment configuration is invalid."""
    pass


class PartitionMismatchError(WalkError):
    """Increments do not match the partition."""
    pass


class FitImpossibleError(WalkError):
    """Too few points for a rate fit."""
    pass


class EigensolverTrialError(WalkError):
    """Eigensolver failed on one trial."""

    def __init__(self, message: str, trial: int):
        super().__init__(message)
        self.trial = trial


def _check_config(cfg: WalkConfig) -> None:
    errors = cfg.validation_errors()
    if errors:
        raise InvalidWalkConfigError("; ".join(errors))


def apportion(weights: npt.ArrayLike, n: int) -> List[int]:
    """
    Largest-remainder rounding of weights * n to integers summing to n.

    Ties go to the lower atom index.
    """
    weights = np.asarray(weights, dtype=np.float64)
    quotas = weights * n
    counts = np.floor(quotas).astype(int)
    remainders = quotas - counts
    shortfall = n - int(np.sum(counts))
    order = np.argsort(-remainders, kind="stable")
    counts[order[:shortfall]] += 1
    return [int(c) for c in counts]


def sample_initial_unitary(law: InitialLaw, n: int, rng: RngStream) -> ComplexMatrix:
    """
    Sample Q D Q* whose spectrum apportions n slots to the atoms of the law.

    A single-atom law gives e^{i theta} I exactly.
    """
    errors = law.validation_errors()
    if errors:
        raise InvalidWalkConfigError("; ".join(errors))
    if len(law.atom_angles) == 1:
        return np.asarray(np.exp(1j * law.atom_angles[0]) * np.eye(n), dtype=np.complex128)

    counts = apportion(law.atom_weights, n)
    phases = np.repeat(np.exp(1j * law.atom_angles), counts)
    q = sample_haar_unitary(n, rng)
    return np.asarray((q * phases[np.newaxis, :]) @ q.conj().T, dtype=np.complex128)


def sample_step(
    step: StepLaw,
    n: int,
    rng: RngStream,
    discretization: Discretization = Discretization.QUANTILE,
) -> ComplexMatrix:
    """Draw one step A_j from the step law."""
    if step.kind == StepKind.HAAR:
        return sample_haar_unitary(n, rng)
    if step.kind == StepKind.CIRCULAR:
        return sample_ginibre(n, rng)
    return sample_bi_invariant(n, step.singular_law, rng, discretization)


def simulate_walk(cfg: WalkConfig, rng: RngStream) -> ComplexMatrix:
    """
    Sample U0 B_k(t) = U0 prod_{j=1..k} (I + sqrt(t/k) A_j).

    At t = 0 the initial unitary is returned unchanged.
    """
    _check_config(cfg)
    walk = sample_initial_unitary(cfg.initial_law, cfg.n, rng)
    if cfg.t == 0.0:
        return walk
    scale = np.sqrt(cfg.t / cfg.k)
    identity = np.eye(cfg.n, dtype=np.complex128)
    for _ in range(cfg.k):
        a = sample_step(cfg.step_law, cfg.n, rng, cfg.discretization)
        walk = walk @ (identity + scale * a)
    return ensure_finite(np.asarray(walk, dtype=np.complex128))


def _trial_eigenvalues(
    cfg: WalkConfig,
    stream: RngStream,
    trial: int,
) -> npt.NDArray[np.complex128]:
    matrix = simulate_walk(cfg, stream)
    try:
        return eigenvalues(matrix, context=stream)
    except SolverFailureError as e:
        raise EigensolverTrialError(f"Eigensolver failed on trial {trial}: {e}", trial) from e


def pooled_esd(
    cfg: WalkConfig,
    rng: Optional[RngStream] = None,
    threads: Optional[int] = None,
) -> ESD:
    """
    Eigenvalues of cfg.trials independent walks, pooled in trial order.

    Trial i draws from RngStream(seed, stream_id=i).
    """
    _check_config(cfg)
    base = rng or RngStream(seed=cfg.seed)
    threads = threads or get_settings().threads
    streams = [base.fork(trial) for trial in range(cfg.trials)]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        spectra = list(
            pool.map(
                lambda pair: _trial_eigenvalues(cfg, pair[1], pair[0]),
                enumerate(streams),
            )
        )
    esd = ESD(eigenvalues=np.concatenate(spectra), n=cfg.n, trials=cfg.trials)
    logger.info(
        "esd_pooled",
        n=cfg.n,
        k=cfg.k,
        t=cfg.t,
        trials=cfg.trials,
        step=cfg.step_law.kind.value,
    )
    return esd


def sigma_min_shifted_experiment(
    cfg: WalkConfig,
    z: complex,
    epsilons: List[float],
    dimensions: Optional[List[int]] = None,
    rng: Optional[RngStream] = None,
    threads: Optional[int] = None,
) -> SigmaMinTable:
    """
    Exceedance table of sigma_min(U0 B_k(t) - z I) over trials.

    Args:
        cfg: Walk configuration; cfg.n is used when dimensions is omitted.
        z: Shift.
        epsilons: Thresholds.
        dimensions: Dimension sweep for the decay fit.
        rng: Base stream (RngStream(cfg.seed) by default).
        threads: Worker threads.

    Returns:
        SigmaMinTable with per-dimension fractions, medians and, for two or
        more dimensions, the fitted exponent gamma of median ~ N^{-gamma}.
    """
    _check_config(cfg)
    if cfg.step_law.summary.kernel_mass > 0.0:
        raise InvalidWalkConfigError("Step law must be almost surely invertible")
    dimensions = dimensions or [cfg.n]
    base = rng or RngStream(seed=cfg.seed)
    threads = threads or get_settings().threads
    shift = complex(z)

    def trial_sigma(n: int, stream: RngStream) -> float:
        walk = simulate_walk(replace(cfg, n=n), stream)
        return sigma_min(walk - shift * np.eye(n))

    exceedance: List[List[float]] = []
    medians: List[float] = []
    quantiles: List[Tuple[float, float, float]] = []
    for index, n in enumerate(dimensions):
        streams = [base.fork(index * cfg.trials + trial) for trial in range(cfg.trials)]
        with ThreadPoolExecutor(max_workers=threads) as pool:
            samples = np.asarray(list(pool.map(partial(trial_sigma, n), streams)))
        exceedance.append([float(np.mean(samples <= eps)) for eps in epsilons])
        low, mid, high = np.quantile(samples, [0.1, 0.5, 0.9])
        medians.append(float(mid))
        quantiles.append((float(low), float(mid), float(high)))
        logger.debug("sigma_min_dimension_done", n=n, median=float(mid))

    gamma = None
    if len(dimensions) >= 2:
        slope = np.polyfit(np.log(dimensions), np.log(medians), 1)[0]
        gamma = float(-slope)

    return SigmaMinTable(
        z=shift,
        epsilons=list(epsilons),
        dimensions=list(dimensions),
        exceedance=exceedance,
        medians=medians,
        quantiles=quantiles,
        gamma=gamma,
    )

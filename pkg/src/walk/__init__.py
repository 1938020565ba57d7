"""
Matrix Random Walk Module.

Provides Monte Carlo experiments on U0 B_k(t) including:
- Walk sampling and pooled empirical spectral distributions
- The shifted smallest-singular-value experiment
- Wong-Zakai products and their convergence-rate experiment

Usage:
    from src.walk import WalkConfig, pooled_esd
    from src.subordination import StepLaw

    cfg = WalkConfig(n=200, k=6, t=1.0, step_law=StepLaw.circular(), seed=1, trials=2)
    esd = pooled_esd(cfg)
"""

from src.walk.models import (
    WalkConfig,
    ESD,
    Partition,
    WzReport,
    SigmaMinTable,
)

from src.walk.simulation import (
    WalkError,
    InvalidWalkConfigError,
    PartitionMismatchError,
    FitImpossibleError,
    EigensolverTrialError,
    apportion,
    sample_initial_unitary,
    sample_step,
    simulate_walk,
    pooled_esd,
    sigma_min_shifted_experiment,
)

from src.walk.wong_zakai import (
    partition_increments,
    brownian_increments,
    coarsen_increments,
    wong_zakai_path,
    wong_zakai_product,
    wz_convergence_experiment,
)

__all__ = [
    # Models
    "WalkConfig",
    "ESD",
    "Partition",
    "WzReport",
    "SigmaMinTable",
    # Simulation
    "WalkError",
    "InvalidWalkConfigError",
    "PartitionMismatchError",
    "FitImpossibleError",
    "EigensolverTrialError",
    "apportion",
    "sample_initial_unitary",
    "sample_step",
    "simulate_walk",
    "pooled_esd",
    "sigma_min_shifted_experiment",
    # Wong-Zakai
    "partition_increments",
    "brownian_increments",
    "coarsen_increments",
    "wong_zakai_path",
    "wong_zakai_product",
    "wz_convergence_experiment",
]

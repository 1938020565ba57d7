"""
Subordination Module.

Provides the free-probability fixed-point machinery of the walk including:
- Cauchy and H transforms of symmetric atomic measures on the imaginary axis
- Step laws (Haar unitary, circular, atomic singular values)
- The Denjoy-Wolff solver for eta_k = -psi_k^2 with tri-state results
- The k = infinity solver for eta_inf

Usage:
    from src.subordination import StepLaw, get_solver
    from src.geometry import InitialLaw

    result = get_solver().solve_eta_k(StepLaw.circular(), InitialLaw.trivial(), k=2, t=6.0, z=-1)
    if result.is_interior:
        print(result.eta)
"""

from src.subordination.models import (
    SymmetricAtomicMeasure,
    StepKind,
    StepLaw,
    EtaState,
    EtaResult,
    SolverConfig,
    SolverStats,
)

from src.subordination.transforms import (
    SubordinationError,
    NonPositiveArgumentError,
    cauchy_symmetric,
    h_transform,
    semicircle_h,
    shifted_z_measure,
    wrapped_lorentzian_sum,
    wrapped_lorentzian_sum_truncated,
)

from src.subordination.solver import (
    ConvergenceError,
    EtaSolver,
    principal_root,
    get_solver,
    set_solver,
    solve_eta_k,
    solve_eta_lambda,
    eta_haar_scalar_equation,
    solve_eta_infinity,
    denjoy_wolff_iterate,
)

__all__ = [
    # Models
    "SymmetricAtomicMeasure",
    "StepKind",
    "StepLaw",
    "EtaState",
    "EtaResult",
    "SolverConfig",
    "SolverStats",
    # Transforms
    "SubordinationError",
    "NonPositiveArgumentError",
    "cauchy_symmetric",
    "h_transform",
    "semicircle_h",
    "shifted_z_measure",
    "wrapped_lorentzian_sum",
    "wrapped_lorentzian_sum_truncated",
    # Service
    "ConvergenceError",
    "EtaSolver",
    "principal_root",
    "get_solver",
    "set_solver",
    "solve_eta_k",
    "solve_eta_lambda",
    "eta_haar_scalar_equation",
    "solve_eta_infinity",
    "denjoy_wolff_iterate",
]

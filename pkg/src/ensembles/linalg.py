"""
Dense Linear Algebra Helpers.

Eigenvalues, smallest singular value and the normalized Hilbert-Schmidt
norm of dense complex matrices, with solver failures surfaced as errors.
"""

from typing import Optional

import numpy as np
import numpy.typing as npt
import scipy.linalg
import structlog

from .models import ComplexMatrix
from .rng import RngStream
from .samplers import SolverFailureError, ensure_finite


logger = structlog.get_logger()


def eigenvalues(
    m: ComplexMatrix,
    context: Optional[RngStream] = None,
) -> npt.NDArray[np.complex128]:
    """
    Eigenvalues of a dense nonsymmetric matrix, with multiplicity.

    Delegates to LAPACK (Hessenberg reduction plus shifted QR).

    Args:
        m: Square matrix with finite entries.
        context: Stream the matrix was drawn from, reported on failure.

    Returns:
        Array of n complex eigenvalues.
    """
    ensure_finite(m)
    try:
        values = scipy.linalg.eigvals(m, check_finite=False)
    except (np.linalg.LinAlgError, ValueError) as e:
        seed = context.seed if context else None
        stream_id = context.stream_id if context else None
        logger.error("eigensolver_failed", n=m.shape[0], seed=seed, stream_id=stream_id)
        raise SolverFailureError(str(e), seed=seed, stream_id=stream_id) from e
    return np.asarray(values, dtype=np.complex128)


def sigma_min(m: ComplexMatrix) -> float:
    """Smallest singular value."""
    ensure_finite(m)
    try:
        singular = scipy.linalg.svdvals(m, check_finite=False)
    except np.linalg.LinAlgError as e:
        raise SolverFailureError(str(e)) from e
    return float(singular[-1])


def hs_norm(m: ComplexMatrix) -> float:
    """Normalized Hilbert-Schmidt norm sqrt((1/n) Tr(m* m))."""
    ensure_finite(m)
    return float(np.sqrt(np.sum(np.abs(m) ** 2) / m.shape[0]))

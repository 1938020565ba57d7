"""
Random Matrix Samplers.

Provides seeded samplers for the classical ensembles:
- Ginibre (i.i.d. complex Gaussian entries, variance 1/n)
- GUE (Hermitian, entry variance 1/n)
- Haar unitary (QR of a Ginibre draw with phase correction)
- Unitarily bi-invariant U T V* with a prescribed singular-value law
"""

from typing import Optional

import numpy as np
import structlog

from .models import ComplexMatrix, Discretization, SingularLaw
from .rng import RngStream


logger = structlog.get_logger()


class EnsembleError(Exception):
    """Base ensemble error."""
    pass


class InvalidDimensionError(EnsembleError):
    """Matrix dimension must be a positive integer."""
    pass


class InvalidLawError(EnsembleError):
    """Singular-value law violates its invariants."""
    pass


class NonFiniteMatrixError(EnsembleError):
    """Matrix contains NaN or Inf entries."""
    pass


class SolverFailureError(EnsembleError):
    """Dense eigen/singular-value solver did not converge."""

    def __init__(
        self,
        message: str,
        seed: Optional[int] = None,
        stream_id: Optional[int] = None,
    ):
        super().__init__(message)
        self.seed = seed
        self.stream_id = stream_id


def _check_dimension(n: int) -> None:
    if not isinstance(n, (int, np.integer)) or n < 1:
        raise InvalidDimensionError(f"Invalid dimension: {n!r}")


def ensure_finite(m: ComplexMatrix) -> ComplexMatrix:
    """Raise NonFiniteMatrixError unless every entry is finite."""
    if not np.all(np.isfinite(m)):
        raise NonFiniteMatrixError(f"Matrix of shape {m.shape} has non-finite entries")
    return m


def sample_ginibre(n: int, rng: RngStream) -> ComplexMatrix:
    """
    Sample an n x n Ginibre matrix.

    Entries are independent complex Gaussians with mean 0 and E|w|^2 = 1/n
    (real and imaginary parts each of variance 1/(2n)).

    Args:
        n: Dimension.
        rng: Random stream; the draw advances it.

    Returns:
        Complex matrix.
    """
    _check_dimension(n)
    gen = rng.generator
    scale = np.sqrt(0.5 / n)
    real = gen.standard_normal((n, n))
    imag = gen.standard_normal((n, n))
    return np.asarray((real + 1j * imag) * scale, dtype=np.complex128)


def sample_gue(n: int, rng: RngStream) -> ComplexMatrix:
    """
    Sample an n x n GUE matrix with entry variance 1/n.

    Built as (G + G*)/sqrt(2) from a Ginibre draw G, so the output is
    Hermitian bit-for-bit.
    """
    g = sample_ginibre(n, rng)
    return np.asarray((g + g.conj().T) / np.sqrt(2.0), dtype=np.complex128)


def sample_haar_unitary(n: int, rng: RngStream) -> ComplexMatrix:
    """
    Sample a Haar-distributed unitary.

    QR-decomposes a Ginibre draw and divides the phases of R's diagonal out
    of Q's columns, which makes the law invariant on both sides.
    """
    g = sample_ginibre(n, rng)
    q, r = np.linalg.qr(g)
    diag = np.diagonal(r)
    phases = diag / np.abs(diag)
    return np.asarray(q * phases[np.newaxis, :], dtype=np.complex128)


def sample_bi_invariant(
    n: int,
    law: SingularLaw,
    rng: RngStream,
    discretization: Discretization = Discretization.QUANTILE,
) -> ComplexMatrix:
    """
    Sample U T V* with U, V independent Haar unitaries.

    Args:
        n: Dimension.
        law: Singular-value law of the step.
        rng: Random stream.
        discretization: QUANTILE puts quantile((i - 1/2)/n) on the diagonal;
            IID draws the diagonal from the law.

    Returns:
        Complex matrix whose singular values are the diagonal of T.
    """
    _check_dimension(n)
    problems = law.validation_errors()
    if problems:
        raise InvalidLawError("; ".join(problems))

    u = sample_haar_unitary(n, rng)
    v = sample_haar_unitary(n, rng)
    if discretization == Discretization.QUANTILE:
        diagonal = law.midpoint_quantiles(n)
    else:
        diagonal = rng.generator.choice(law.atom_values, size=n, p=law.atom_weights)

    return np.asarray((u * diagonal[np.newaxis, :]) @ v.conj().T, dtype=np.complex128)

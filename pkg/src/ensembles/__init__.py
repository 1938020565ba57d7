"""
Random Matrix Ensembles Module.

Provides seeded dense random-matrix sampling and linear algebra including:
- Ginibre, GUE and Haar unitary samplers
- Unitarily bi-invariant matrices U T V* from atomic singular-value laws
- Reproducible (seed, stream_id) random streams
- Eigenvalues, smallest singular value and normalized HS norm

Usage:
    from src.ensembles import RngStream, sample_haar_unitary, eigenvalues

    rng = RngStream(seed=7, stream_id=0)
    u = sample_haar_unitary(32, rng)
    spectrum = eigenvalues(u, context=rng)
"""

from src.ensembles.models import (
    ComplexMatrix,
    Discretization,
    SingularLaw,
    quarter_circle_law,
)

from src.ensembles.rng import RngStream

from src.ensembles.samplers import (
    EnsembleError,
    InvalidDimensionError,
    InvalidLawError,
    NonFiniteMatrixError,
    SolverFailureError,
    ensure_finite,
    sample_ginibre,
    sample_gue,
    sample_haar_unitary,
    sample_bi_invariant,
)

from src.ensembles.linalg import (
    eigenvalues,
    sigma_min,
    hs_norm,
)

__all__ = [
    # Models
    "ComplexMatrix",
    "Discretization",
    "SingularLaw",
    "quarter_circle_law",
    # Streams
    "RngStream",
    # Samplers
    "EnsembleError",
    "InvalidDimensionError",
    "InvalidLawError",
    "NonFiniteMatrixError",
    "SolverFailureError",
    "ensure_finite",
    "sample_ginibre",
    "sample_gue",
    "sample_haar_unitary",
    "sample_bi_invariant",
    # Linear algebra
    "eigenvalues",
    "sigma_min",
    "hs_norm",
]

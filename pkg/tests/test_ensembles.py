"""
Tests for Random Matrix Ensembles Module.

Tests seeded streams, samplers, singular-value laws and linear algebra.
"""

import numpy as np
import pytest
from scipy.stats import ks_2samp

from src.ensembles import (
    # Models
    Discretization,
    SingularLaw,
    quarter_circle_law,
    # Streams
    RngStream,
    # Samplers
    InvalidDimensionError,
    InvalidLawError,
    NonFiniteMatrixError,
    ensure_finite,
    sample_ginibre,
    sample_gue,
    sample_haar_unitary,
    sample_bi_invariant,
    # Linear algebra
    eigenvalues,
    sigma_min,
    hs_norm,
)


@pytest.fixture
def rng():
    """Fresh stream with a fixed key."""
    return RngStream(seed=12345, stream_id=0)


# =============================================================================
# Stream Tests
# =============================================================================

class TestRngStream:
    """Tests for RngStream."""

    def test_same_key_same_sequence(self):
        """Test that two streams with the same key replay the same draws."""
        a = RngStream(seed=3, stream_id=5).generator.standard_normal(8)
        b = RngStream(seed=3, stream_id=5).generator.standard_normal(8)
        np.testing.assert_array_equal(a, b)

    def test_distinct_stream_ids_differ(self):
        """Test that stream ids separate the sequences."""
        a = RngStream(seed=3, stream_id=0).generator.standard_normal(8)
        b = RngStream(seed=3, stream_id=1).generator.standard_normal(8)
        assert not np.array_equal(a, b)

    def test_fork_keeps_seed(self):
        """Test that fork only changes the stream id."""
        fork = RngStream(seed=9, stream_id=2).fork(7)
        assert fork.seed == 9
        assert fork.stream_id == 7

    def test_reset_rewinds(self, rng):
        """Test that reset replays from the start."""
        first = rng.generator.standard_normal(4)
        rng.reset()
        np.testing.assert_array_equal(first, rng.generator.standard_normal(4))

    def test_to_dict(self):
        """Test dictionary form."""
        assert RngStream(seed=1, stream_id=2).to_dict() == {
            "seed": 1,
            "stream_id": 2,
            "algorithm": "PCG64",
        }


# =============================================================================
# Singular Law Tests
# =============================================================================

class TestSingularLaw:
    """Tests for SingularLaw."""

    def test_point_law_is_haar_step(self):
        """Test the unit point mass."""
        law = SingularLaw.point()
        assert law.validation_errors() == []
        assert law.second_moment == pytest.approx(1.0)
        assert law.inv_l2_sq == pytest.approx(1.0)

    def test_kernel_mass_and_inverse(self):
        """Test that an atom at zero gives an infinite inverse moment."""
        law = SingularLaw(values=[0.0, np.sqrt(2.0)], weights=[0.5, 0.5])
        assert law.kernel_mass == pytest.approx(0.5)
        assert np.isinf(law.inv_l2_sq)
        assert law.validation_errors() == []

    def test_unnormalized_law_rejected(self):
        """Test that a normalized law must have second moment 1."""
        law = SingularLaw(values=[2.0], weights=[1.0])
        assert any("second moment" in error for error in law.validation_errors())

    def test_bad_weights_rejected(self):
        """Test weight checks."""
        law = SingularLaw(values=[1.0, 1.0], weights=[0.7, 0.7])
        assert any("sum" in error for error in law.validation_errors())

    def test_midpoint_quantiles(self):
        """Test the quantile diagonal of a two-atom law."""
        law = SingularLaw(values=[0.5, np.sqrt(1.75)], weights=[0.5, 0.5])
        diagonal = law.midpoint_quantiles(4)
        np.testing.assert_allclose(diagonal, [0.5, 0.5, np.sqrt(1.75), np.sqrt(1.75)])

    def test_quarter_circle_normalized(self):
        """Test that the discretized quarter-circle law has second moment 1."""
        law = quarter_circle_law(256)
        assert law.validation_errors() == []
        assert law.second_moment == pytest.approx(1.0, abs=1e-9)
        assert np.all(law.atom_values > 0.0)

    def test_round_trip(self):
        """Test dictionary round trip."""
        law = SingularLaw(values=[0.5, np.sqrt(1.75)], weights=[0.5, 0.5])
        restored = SingularLaw.from_dict(law.to_dict())
        assert restored.to_dict() == law.to_dict()


# =============================================================================
# Sampler Tests
# =============================================================================

class TestSamplers:
    """Tests for the matrix samplers."""

    def test_invalid_dimension(self, rng):
        """Test that n < 1 is rejected."""
        with pytest.raises(InvalidDimensionError):
            sample_ginibre(0, rng)

    def test_ginibre_normalization(self, rng):
        """Test that (1/n) Tr(G G*) is close to 1."""
        g = sample_ginibre(200, rng)
        assert hs_norm(g) ** 2 == pytest.approx(1.0, abs=0.02)

    def test_ginibre_reproducible(self):
        """Test that identical keys give identical matrices."""
        a = sample_ginibre(5, RngStream(seed=4))
        b = sample_ginibre(5, RngStream(seed=4))
        np.testing.assert_array_equal(a, b)

    def test_gue_hermitian(self, rng):
        """Test that GUE draws are exactly Hermitian."""
        x = sample_gue(16, rng)
        np.testing.assert_array_equal(x, x.conj().T)

    def test_gue_fourth_moment(self, rng):
        """Test (1/n) Tr X^4 against the semicircle value 2."""
        n = 32
        moments = []
        for _ in range(200):
            x = sample_gue(n, rng)
            x2 = x @ x
            moments.append(np.real(np.trace(x2 @ x2)) / n)
        assert np.mean(moments) == pytest.approx(2.0, rel=0.05)

    def test_haar_unitary(self, rng):
        """Test that Haar draws are unitary."""
        u = sample_haar_unitary(12, rng)
        np.testing.assert_allclose(u @ u.conj().T, np.eye(12), atol=1e-12)

    def test_haar_trace_second_moment(self, rng):
        """Test E|Tr U|^2 = 1 for Haar unitaries."""
        traces = [abs(np.trace(sample_haar_unitary(16, rng))) ** 2 for _ in range(2000)]
        assert 0.9 <= np.mean(traces) <= 1.1

    def test_bi_invariant_singular_values(self, rng):
        """Test that quantile discretization fixes the singular values."""
        law = SingularLaw(values=[0.5, np.sqrt(1.75)], weights=[0.5, 0.5])
        m = sample_bi_invariant(8, law, rng, Discretization.QUANTILE)
        singular = np.sort(np.linalg.svd(m, compute_uv=False))
        np.testing.assert_allclose(singular, np.sort(law.midpoint_quantiles(8)), atol=1e-12)

    def test_bi_invariant_iid_atoms(self, rng):
        """Test that IID discretization only uses atoms of the law."""
        law = SingularLaw(values=[0.5, np.sqrt(1.75)], weights=[0.5, 0.5])
        m = sample_bi_invariant(10, law, rng, Discretization.IID)
        singular = np.linalg.svd(m, compute_uv=False)
        distances = np.min(np.abs(singular[:, None] - law.atom_values[None, :]), axis=1)
        assert np.all(distances < 1e-10)

    def test_bi_invariance(self):
        """Test that Q1 A Q2* has the trace statistics of A for fixed unitaries."""
        n, draws = 6, 500
        law = SingularLaw(values=[0.5, np.sqrt(1.75)], weights=[0.5, 0.5])
        q1 = sample_haar_unitary(n, RngStream(seed=1))
        q2 = sample_haar_unitary(n, RngStream(seed=2))
        plain, rotated = RngStream(seed=3), RngStream(seed=4)

        def moments(m):
            squared = m @ m
            return (
                np.trace(m @ m.conj().T).real / n,
                np.trace(squared @ m.conj().T).real / n,
                np.trace(m).real / n,
            )

        def draw(stream, i):
            return sample_bi_invariant(n, law, stream.fork(i), Discretization.IID)

        base = [moments(draw(plain, i)) for i in range(draws)]
        moved = [moments(q1 @ draw(rotated, i) @ q2.conj().T) for i in range(draws)]
        for column in range(3):
            result = ks_2samp([row[column] for row in base], [row[column] for row in moved])
            assert result.pvalue > 1e-3

    def test_bi_invariant_invalid_law(self, rng):
        """Test that invalid laws are rejected."""
        with pytest.raises(InvalidLawError):
            sample_bi_invariant(4, SingularLaw(values=[3.0], weights=[1.0]), rng)

    def test_ensure_finite(self):
        """Test that non-finite entries raise."""
        m = np.eye(2, dtype=np.complex128)
        m[0, 1] = np.nan
        with pytest.raises(NonFiniteMatrixError):
            ensure_finite(m)


# =============================================================================
# Linear Algebra Tests
# =============================================================================

class TestLinalg:
    """Tests for eigenvalues, sigma_min and hs_norm."""

    def test_eigenvalues_diagonal(self):
        """Test eigenvalues of a diagonal matrix."""
        m = np.diag([1.0 + 0j, 2.0j, -3.0])
        np.testing.assert_allclose(np.sort_complex(eigenvalues(m)), np.sort_complex(np.diag(m)))

    def test_eigenvalues_count(self, rng):
        """Test that n eigenvalues come back."""
        assert len(eigenvalues(sample_ginibre(7, rng), context=rng)) == 7

    def test_haar_eigenvalues_on_circle(self, rng):
        """Test that unitary spectra lie on the unit circle."""
        values = eigenvalues(sample_haar_unitary(20, rng))
        np.testing.assert_allclose(np.abs(values), 1.0, atol=1e-10)

    def test_sigma_min(self):
        """Test the smallest singular value of a diagonal matrix."""
        assert sigma_min(np.diag([3.0 + 0j, 0.25, 1.0])) == pytest.approx(0.25)

    def test_hs_norm_identity(self):
        """Test that the normalized HS norm of I is 1."""
        assert hs_norm(np.eye(9, dtype=np.complex128)) == pytest.approx(1.0)

    def test_non_finite_rejected(self):
        """Test that eigenvalues refuse non-finite input."""
        with pytest.raises(NonFiniteMatrixError):
            eigenvalues(np.array([[np.inf, 0.0], [0.0, 1.0]], dtype=np.complex128))

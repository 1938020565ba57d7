"""
Subordination Solver Service.

Provides the Denjoy-Wolff point psi = i sqrt(eta) of the walk including:
- Bracketed root finding of the fixed point y = Im H_step(H_{|Z - lambda|}(iy))
- The E_{2,k} short-circuit to the disk state
- The reduced scalar equation for Haar steps
- The k = infinity equation of the free multiplicative Brownian motion
- Raw Denjoy-Wolff iteration as a cross-check
"""

import cmath
import math
import threading
from dataclasses import dataclass
from typing import Callable, Optional, Tuple

import numpy as np
import numpy.typing as npt
import structlog
from scipy.optimize import brentq

from src.geometry import InitialLaw, e2_contains, lifetime_k

from .models import (
    EtaResult,
    EtaState,
    SolverConfig,
    SolverStats,
    StepKind,
    StepLaw,
)
from .transforms import (
    NonPositiveArgumentError,
    SubordinationError,
    wrapped_lorentzian_sum,
)


logger = structlog.get_logger()

ROOT_RTOL = 4.0 * float(np.finfo(np.float64).eps)
ROOT_XTOL = 1e-300
DISK_DIVERGENCE = 1e150


class ConvergenceError(SubordinationError):
    """Root finding or fixed-point iteration did not converge."""

    def __init__(self, message: str, iterations: int = 0, residual: float = float("nan")):
        super().__init__(message)
        self.iterations = iterations
        self.residual = residual


def principal_root(z: complex, k: int) -> complex:
    """k-th root of z with argument in (-pi/k, pi/k]."""
    z = complex(z)
    if z == 0:
        return 0j
    angle = math.atan2(z.imag, z.real)
    if angle == -math.pi:
        angle = math.pi
    return abs(z) ** (1.0 / k) * cmath.exp(1j * angle / k)


@dataclass
class _ImaginaryAxisMap:
    """y -> Im H_step(H_{|Z - lambda|}(iy)) for y > 0."""
    distances_sq: npt.NDArray[np.float64]
    weights: npt.NDArray[np.float64]
    v: float
    kind: StepKind
    scaled_sigma_sq: npt.NDArray[np.float64]
    sigma_weights: npt.NDArray[np.float64]

    def inner(self, y: float) -> float:
        d2 = self.distances_sq
        denominator = y * y + d2
        g = float(np.sum(self.weights * y / denominator))
        defect = float(np.sum(self.weights * d2 / denominator))
        return defect / g

    def outer(self, h: float) -> float:
        if self.kind == StepKind.CIRCULAR:
            return 2.0 * self.v / (math.sqrt(h * h + 4.0 * self.v) + h)
        x2 = self.scaled_sigma_sq
        if h == 0.0:
            return 0.0 if np.any(x2 == 0.0) else float("inf")
        denominator = h * h + x2
        g = float(np.sum(self.sigma_weights * h / denominator))
        defect = float(np.sum(self.sigma_weights * x2 / denominator))
        return defect / g

    def __call__(self, y: float) -> float:
        return self.outer(self.inner(y))

    def relative_defect(self, y: float) -> float:
        return self(y) / y - 1.0

    def origin_slope(self) -> float:
        """lim_{y -> 0} F(y)/y = v sum w/|lambda - zeta|^2."""
        if np.any(self.distances_sq == 0.0):
            return float("inf")
        return self.v * float(np.sum(self.weights / self.distances_sq))


class EtaSolver:
    """
    Solver for the imaginary-axis Denjoy-Wolff point of the walk.

    Features:
    - Tri-state results (interior, exterior, disk)
    - Consistency check against the lifetime test
    - Outcome statistics
    """

    def __init__(self, config: Optional[SolverConfig] = None):
        self.config = config or SolverConfig()
        self._stats = SolverStats()
        self._lock = threading.Lock()

    def _validate(self, step: StepLaw, k: int, t: float) -> None:
        if k < 1:
            raise NonPositiveArgumentError(f"Step count must be positive, got {k}")
        if not t > 0.0:
            raise NonPositiveArgumentError(f"Time must be positive, got {t!r}")
        errors = step.validation_errors()
        if errors:
            raise SubordinationError(f"Invalid step law: {'; '.join(errors)}")

    def _record(self, result: EtaResult) -> EtaResult:
        with self._lock:
            self._stats.total_solves += 1
            if result.state == EtaState.INTERIOR:
                self._stats.interior += 1
            elif result.state == EtaState.EXTERIOR_ZERO:
                self._stats.exterior_zero += 1
            else:
                self._stats.disk_infinite += 1
        return result

    def _fail(self, error: ConvergenceError) -> ConvergenceError:
        with self._lock:
            self._stats.failures += 1
        logger.error(
            "eta_solve_failed",
            error=str(error),
            iterations=error.iterations,
            residual=error.residual,
        )
        return error

    def _build_map(
        self,
        step: StepLaw,
        law: InitialLaw,
        k: int,
        t: float,
        lam: complex,
    ) -> _ImaginaryAxisMap:
        points, weights = law.root_points(k)
        v = t / k
        if step.kind == StepKind.CIRCULAR:
            sigma_sq = np.zeros(0)
            sigma_weights = np.zeros(0)
        else:
            singular = step.singular_law
            sigma_sq = v * singular.atom_values ** 2
            sigma_weights = singular.atom_weights
        return _ImaginaryAxisMap(
            distances_sq=np.abs(points - lam) ** 2,
            weights=weights,
            v=v,
            kind=step.kind,
            scaled_sigma_sq=sigma_sq,
            sigma_weights=sigma_weights,
        )

    def _upper_bracket(self, fn: Callable[[float], float], start: float = 1.0) -> Optional[float]:
        """Smallest start * 2^m with fn <= 0, or None."""
        hi = start
        for _ in range(self.config.max_bracket_doublings):
            if fn(hi) <= 0.0:
                return hi
            hi *= 2.0
        return None

    def _lower_bracket(self, fn: Callable[[float], float], hi: float) -> Optional[float]:
        """Largest hi * 2^-m with fn >= 0, or None."""
        lo = hi
        for _ in range(self.config.max_bracket_halvings):
            if fn(lo) >= 0.0:
                return lo
            lo *= 0.5
            if lo == 0.0:
                break
        return None

    def _root(self, fn: Callable[[float], float], lo: float, hi: float) -> Tuple[float, int]:
        if lo == hi:
            return lo, 0
        try:
            root, info = brentq(
                fn,
                lo,
                hi,
                xtol=ROOT_XTOL,
                rtol=ROOT_RTOL,
                maxiter=self.config.max_iterations,
                full_output=True,
            )
        except RuntimeError as e:
            raise self._fail(
                ConvergenceError(str(e), iterations=self.config.max_iterations)
            ) from e
        return float(root), int(info.iterations)

    def _check_consistency(
        self,
        law: InitialLaw,
        k: int,
        t: float,
        lam: complex,
        result: EtaResult,
    ) -> None:
        if result.state == EtaState.DISK_INFINITE:
            return
        lifetime = lifetime_k(law, k, lam ** k)
        inside = lifetime < t
        if inside == result.is_interior:
            return
        if abs(lifetime - t) <= self.config.boundary_band * max(1.0, t):
            return
        with self._lock:
            self._stats.state_disagreements += 1
        logger.warning(
            "eta_state_disagrees_with_lifetime",
            k=k,
            t=t,
            lam=str(lam),
            lifetime=lifetime,
            state=result.state.value,
        )

    def solve_eta_lambda(
        self,
        step: StepLaw,
        law: InitialLaw,
        k: int,
        t: float,
        lam: complex,
    ) -> EtaResult:
        """
        Solve for eta at a point lambda of the linearized plane.

        Args:
            step: Step distribution.
            law: Initial spectral law.
            k: Number of steps.
            t: Time.
            lam: Point of the lambda-plane (z = lam^k).

        Returns:
            EtaResult in one of the three states.

        Raises:
            ConvergenceError: Root refinement exceeded the iteration cap.
        """
        self._validate(step, k, t)
        lam = complex(lam)
        summary = step.summary
        if summary.invertible and e2_contains(law, k, t, lam, summary):
            return self._record(EtaResult(state=EtaState.DISK_INFINITE))

        fmap = self._build_map(step, law, k, t, lam)
        if fmap.origin_slope() <= 1.0:
            result = EtaResult(state=EtaState.EXTERIOR_ZERO)
            self._check_consistency(law, k, t, lam, result)
            return self._record(result)

        hi = self._upper_bracket(fmap.relative_defect)
        if hi is None:
            logger.warning("eta_bracket_unbounded", k=k, t=t, lam=str(lam))
            return self._record(EtaResult(state=EtaState.DISK_INFINITE))
        lo = self._lower_bracket(fmap.relative_defect, hi)
        if lo is None:
            result = EtaResult(state=EtaState.EXTERIOR_ZERO)
            self._check_consistency(law, k, t, lam, result)
            return self._record(result)

        y_star, iterations = self._root(fmap.relative_defect, lo, hi)
        residual = abs(fmap(y_star) - y_star)
        if residual > self.config.fixed_point_tolerance * max(1.0, y_star):
            raise self._fail(
                ConvergenceError(
                    f"Fixed-point residual {residual:.3e} above tolerance",
                    iterations=iterations,
                    residual=residual,
                )
            )
        result = EtaResult(
            state=EtaState.INTERIOR,
            eta=y_star * y_star,
            iterations=iterations,
            residual=residual,
        )
        logger.debug("eta_solved", k=k, t=t, eta=result.eta, iterations=iterations)
        self._check_consistency(law, k, t, lam, result)
        return self._record(result)

    def solve_eta_k(
        self,
        step: StepLaw,
        law: InitialLaw,
        k: int,
        t: float,
        z: complex,
    ) -> EtaResult:
        """Solve for eta_k(t, z) at the principal k-th root of z."""
        return self.solve_eta_lambda(step, law, k, t, principal_root(z, k))

    def eta_haar_scalar_equation(
        self,
        law: InitialLaw,
        k: int,
        t: float,
        z: complex,
    ) -> EtaResult:
        """
        Solve the Haar-step equation (1/k) sum w/(d^2 + eta) = 1/(eta + t/k).

        d runs over the distances from lambda = z^{1/k} to the points of Z.
        """
        step = StepLaw.haar()
        self._validate(step, k, t)
        lam = principal_root(z, k)
        if e2_contains(law, k, t, lam, step.summary):
            return self._record(EtaResult(state=EtaState.DISK_INFINITE))

        points, weights = law.root_points(k)
        d2 = np.abs(points - lam) ** 2
        v = t / k

        def excess(eta: float) -> float:
            with np.errstate(divide="ignore"):
                return float(np.sum(weights / (d2 + eta))) - 1.0 / (eta + v)

        if excess(0.0) <= 0.0:
            result = EtaResult(state=EtaState.EXTERIOR_ZERO)
            self._check_consistency(law, k, t, lam, result)
            return self._record(result)

        hi = self._upper_bracket(excess)
        if hi is None:
            logger.warning("eta_bracket_unbounded", k=k, t=t, lam=str(lam))
            return self._record(EtaResult(state=EtaState.DISK_INFINITE))
        lo = 0.0 if math.isfinite(excess(0.0)) else self._lower_bracket(excess, hi)
        if lo is None:
            result = EtaResult(state=EtaState.EXTERIOR_ZERO)
            return self._record(result)

        eta, iterations = self._root(excess, lo, hi)
        result = EtaResult(
            state=EtaState.INTERIOR,
            eta=eta,
            iterations=iterations,
            residual=abs(excess(eta)),
        )
        self._check_consistency(law, k, t, lam, result)
        return self._record(result)

    def solve_eta_infinity(self, law: InitialLaw, t: float, z: complex) -> EtaResult:
        """
        Solve sum_i w_i S(rho^2 + eta; theta - theta_i) = 1/t for eta >= 0.

        z = e^rho e^{i theta}; S is the periodized Lorentzian sum.

        Raises:
            NonPositiveArgumentError: z = 0 or t <= 0.
        """
        if not t > 0.0:
            raise NonPositiveArgumentError(f"Time must be positive, got {t!r}")
        z = complex(z)
        if z == 0:
            raise NonPositiveArgumentError("z = 0 has no logarithm")
        rho = math.log(abs(z))
        phases = cmath.phase(z) - law.atom_angles
        weights = law.atom_weights
        target = 1.0 / t

        def excess(eta: float) -> float:
            return float(np.sum(weights * wrapped_lorentzian_sum(rho * rho + eta, phases))) - target

        at_zero = excess(0.0)
        if at_zero <= 0.0:
            return self._record(EtaResult(state=EtaState.EXTERIOR_ZERO))

        hi = self._upper_bracket(excess)
        if hi is None:
            raise self._fail(ConvergenceError("No upper bracket for eta_infinity"))
        lo = 0.0 if math.isfinite(at_zero) else self._lower_bracket(excess, hi)
        if lo is None:
            return self._record(EtaResult(state=EtaState.EXTERIOR_ZERO))

        eta, iterations = self._root(excess, lo, hi)
        result = EtaResult(
            state=EtaState.INTERIOR,
            eta=eta,
            iterations=iterations,
            residual=abs(excess(eta)),
        )
        logger.debug("eta_infinity_solved", t=t, eta=eta, iterations=iterations)
        return self._record(result)

    def denjoy_wolff_iterate(
        self,
        step: StepLaw,
        law: InitialLaw,
        k: int,
        t: float,
        lam: complex,
        y0: float = 1.0,
    ) -> EtaResult:
        """
        Plain iteration y <- Im H_step(H_{|Z - lambda|}(iy)) from y0.

        Converges slowly near the boundary of the domain.

        Raises:
            ConvergenceError: Iteration cap reached.
        """
        self._validate(step, k, t)
        if not y0 > 0.0:
            raise NonPositiveArgumentError(f"Starting point must be positive, got {y0!r}")
        fmap = self._build_map(step, law, k, t, complex(lam))
        y = y0
        for iteration in range(1, self.config.dw_max_iterations + 1):
            y_next = fmap(y)
            if not math.isfinite(y_next) or y_next > DISK_DIVERGENCE:
                return EtaResult(state=EtaState.DISK_INFINITE, iterations=iteration)
            if y_next == 0.0:
                return EtaResult(state=EtaState.EXTERIOR_ZERO, iterations=iteration)
            step_size = abs(y_next - y)
            y = y_next
            if step_size <= self.config.dw_tolerance * max(1.0, y):
                residual = abs(fmap(y) - y)
                if fmap.origin_slope() <= 1.0:
                    return EtaResult(
                        state=EtaState.EXTERIOR_ZERO,
                        iterations=iteration,
                        residual=residual,
                    )
                return EtaResult(
                    state=EtaState.INTERIOR,
                    eta=y * y,
                    iterations=iteration,
                    residual=residual,
                )
        raise self._fail(
            ConvergenceError(
                "Denjoy-Wolff iteration did not converge",
                iterations=self.config.dw_max_iterations,
                residual=abs(fmap(y) - y),
            )
        )

    def get_stats(self) -> SolverStats:
        """Get a snapshot of the solver statistics."""
        with self._lock:
            return SolverStats(**self._stats.to_dict())

    def reset_stats(self) -> None:
        """Clear the solver statistics."""
        with self._lock:
            self._stats = SolverStats()


# Global solver instance
_solver: Optional[EtaSolver] = None


def get_solver() -> EtaSolver:
    """Get the global solver instance."""
    global _solver
    if _solver is None:
        _solver = EtaSolver()
    return _solver


def set_solver(solver: Optional[EtaSolver]) -> None:
    """Replace (or clear) the global solver instance."""
    global _solver
    _solver = solver


def solve_eta_k(step: StepLaw, law: InitialLaw, k: int, t: float, z: complex) -> EtaResult:
    """Solve for eta_k(t, z) with the global solver."""
    return get_solver().solve_eta_k(step, law, k, t, z)


def solve_eta_lambda(
    step: StepLaw,
    law: InitialLaw,
    k: int,
    t: float,
    lam: complex,
) -> EtaResult:
    """Solve for eta at a lambda-plane point with the global solver."""
    return get_solver().solve_eta_lambda(step, law, k, t, lam)


def eta_haar_scalar_equation(law: InitialLaw, k: int, t: float, z: complex) -> EtaResult:
    """Solve the Haar-step scalar equation with the global solver."""
    return get_solver().eta_haar_scalar_equation(law, k, t, z)


def solve_eta_infinity(law: InitialLaw, t: float, z: complex) -> EtaResult:
    """Solve for eta_inf(t, z) with the global solver."""
    return get_solver().solve_eta_infinity(law, t, z)


def denjoy_wolff_iterate(
    step: StepLaw,
    law: InitialLaw,
    k: int,
    t: float,
    lam: complex,
    y0: float = 1.0,
) -> EtaResult:
    """Raw Denjoy-Wolff iteration with the global solver."""
    return get_solver().denjoy_wolff_iterate(step, law, k, t, lam, y0)

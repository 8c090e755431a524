"""l2,1-regularized least squares in a band-by-band DCT basis.

    min_X  f(X) + g(X),   f(X) = 1/2 ||Y - X Phi||_F^2,   g(X) = lambda ||X Psi||_{2,1}

Phi selects the sampled pixels, so grad f(X) = (X Phi - Y) Phi^T and its
Lipschitz constant is ||Phi Phi^T|| = 1: the step size is exactly 1. Psi is
the orthonormal DCT, so prox_g is the group soft-threshold of the DCT
coefficient columns followed by the inverse transform.
"""

import logging
import math
from typing import Optional, Tuple

import numpy as np

from stemfill.core import Observation, SpectrumImage, embed
from stemfill.errors import DimensionMismatchError, InvalidParameterError, NonFiniteError
from stemfill.transforms import BasisKind, column_norms, forward_planes, inverse_planes
from stemfill.utilities.timing import Stopwatch

from .config import EPSILON, SolverConfig, SolverReport

logger = logging.getLogger(__name__)

LIPSCHITZ = 1.0
BASIS = BasisKind.DCT2


def prox_l21(v: np.ndarray, tau: float) -> np.ndarray:
    """Group soft-threshold of every column (axis 0 is the band axis)."""
    if tau < 0:
        raise InvalidParameterError("tau", tau, "must be >= 0")
    v = np.asarray(v, dtype=np.float64)
    if tau == 0:
        return v.copy()
    norms = np.sqrt(np.sum(v**2, axis=0))
    with np.errstate(divide="ignore", invalid="ignore"):
        scale = np.where(norms < tau, 0.0, 1.0 - tau / norms)
    scale = np.where(norms == 0.0, 0.0, scale)
    return v * scale


def l21_norm(u: np.ndarray) -> float:
    return float(np.sum(np.sqrt(np.sum(np.asarray(u) ** 2, axis=0))))


class Problem:
    """Data term and regularizer on raw ``bands x pixels`` arrays."""

    def __init__(self, y: Observation):
        self.y = y
        self.values = y.values
        self.indices = y.mask.indices
        self.height = y.height
        self.width = y.width
        self.bands = y.bands
        self.shape = (y.bands, y.height, y.width)

    def initial(self) -> np.ndarray:
        return np.array(embed(self.y).data)

    def data_fidelity(self, x: np.ndarray) -> float:
        residual = x[:, self.indices] - self.values
        return 0.5 * float(np.sum(residual**2))

    def gradient(self, x: np.ndarray) -> np.ndarray:
        grad = np.zeros_like(x)
        grad[:, self.indices] = x[:, self.indices] - self.values
        return grad

    def coefficients(self, x: np.ndarray) -> np.ndarray:
        return forward_planes(x.reshape(self.shape), BASIS)

    def regularizer(self, x: np.ndarray) -> float:
        return l21_norm(self.coefficients(x))

    def prox(self, v: np.ndarray, tau: float) -> Tuple[np.ndarray, float, int]:
        """prox of tau ||. Psi||_{2,1} at ``v``.

        Also returns the l2,1 norm of the result and its count of nonzero
        coefficient columns, both read off the shrunk column norms.
        """
        if tau == 0:
            norms = np.sqrt(np.sum(self.coefficients(v) ** 2, axis=0))
            return v.copy(), float(np.sum(norms)), int(np.count_nonzero(norms))
        coeffs = self.coefficients(v)
        norms = np.sqrt(np.sum(coeffs**2, axis=0))
        shrunk = np.maximum(norms - tau, 0.0)
        with np.errstate(divide="ignore", invalid="ignore"):
            scale = np.where(norms > 0.0, shrunk / norms, 0.0)
        x = inverse_planes(coeffs * scale, BASIS).reshape(self.bands, -1)
        return x, float(np.sum(shrunk)), int(np.count_nonzero(shrunk))

    def step(self, z: np.ndarray, lam: float):
        return self.prox(z - self.gradient(z) / LIPSCHITZ, lam / LIPSCHITZ)

    @property
    def columns(self) -> int:
        return self.height * self.width


def _as_array(x: SpectrumImage, y: Observation) -> np.ndarray:
    if not (x.same_grid(y.mask) and x.bands == y.bands):
        raise DimensionMismatchError(
            "image vs observation", (y.height, y.width, y.bands), x.shape
        )
    return x.data


def objective(x: SpectrumImage, y: Observation, lam: float) -> Tuple[float, float]:
    """``(f, g)`` with g already weighted by ``lam``."""
    problem = Problem(y)
    data = _as_array(x, y)
    return problem.data_fidelity(data), lam * problem.regularizer(data)


def grad_f(x: SpectrumImage, y: Observation) -> SpectrumImage:
    return x.with_data(Problem(y).gradient(_as_array(x, y)))


def prox_g(x: SpectrumImage, tau: float) -> SpectrumImage:
    if tau < 0:
        raise InvalidParameterError("tau", tau, "must be >= 0")
    coeffs = forward_planes(x.planes(), BASIS)
    shrunk = inverse_planes(prox_l21(coeffs, tau), BASIS)
    return x.with_data(shrunk.reshape(x.bands, -1))


def fixed_point_residual(x: SpectrumImage, y: Observation, lam: float) -> float:
    """||X - prox_{g/L}(X - grad f(X)/L)||_F / max(||X||_F, 1)."""
    problem = Problem(y)
    data = _as_array(x, y)
    stepped, _, _ = problem.step(data, lam)
    return float(np.linalg.norm(data - stepped)) / max(float(np.linalg.norm(data)), 1.0)


def _check_finite(x: np.ndarray, iteration: int):
    if not np.all(np.isfinite(x)):
        raise NonFiniteError(
            f"Non-finite iterate at iteration {iteration}; check the input scaling"
        )


def _run(
    y: Observation,
    lam: float,
    config: SolverConfig,
    x0: Optional[SpectrumImage],
    momentum: bool,
) -> Tuple[SpectrumImage, SolverReport]:
    if not (math.isfinite(lam) and lam >= 0):
        raise InvalidParameterError("lambda", lam, "must be finite and >= 0")
    problem = Problem(y)
    x_prev = problem.initial() if x0 is None else np.array(_as_array(x0, y))
    _check_finite(x_prev, 0)
    initial_norms = column_norms(problem.coefficients(x_prev))
    initial_reg = float(np.sum(initial_norms))
    initial_objective = problem.data_fidelity(x_prev) + lam * initial_reg

    z = x_prev
    theta = 1.0
    trace = []
    best = (initial_objective, x_prev, initial_reg, int(np.count_nonzero(initial_norms)))
    converged = False
    iteration = 0
    with Stopwatch() as watch:
        for iteration in range(1, config.max_iters + 1):
            x, reg, active = problem.step(z, lam)
            _check_finite(x, iteration)
            value = problem.data_fidelity(x) + lam * reg
            trace.append(value)
            if value <= best[0]:
                best = (value, x, reg, active)

            change = float(np.linalg.norm(x - x_prev)) / max(
                float(np.linalg.norm(x_prev)), EPSILON
            )
            if momentum:
                theta_next = 0.5 * (1.0 + math.sqrt(1.0 + 4.0 * theta**2))
                z = x + ((theta - 1.0) / theta_next) * (x - x_prev)
                theta = theta_next
            else:
                z = x
            x_prev = x

            if iteration % 100 == 0:
                logger.debug(f"iter {iteration}: objective={value:.6e} change={change:.3e}")
            if change < config.rel_tol:
                converged = True
                break

    final, final_reg, final_active = x_prev, reg, active
    if trace and trace[-1] > initial_objective:
        # Momentum is not monotone; never hand back something worse than the start.
        logger.warning(
            f"Last iterate ({trace[-1]:.6e}) is worse than the initialization "
            f"({initial_objective:.6e}); returning the best iterate instead"
        )
        _, final, final_reg, final_active = best

    fidelity = problem.data_fidelity(final)
    report = SolverReport(
        iterations_run=iteration,
        objective_trace=tuple(trace),
        final_objective=fidelity + lam * final_reg,
        final_data_fidelity=fidelity,
        final_regularizer=final_reg,
        chosen_lambda=float(lam),
        converged=converged,
        wall_time_s=watch.elapsed,
        sparsity=final_active / problem.columns,
    )
    logger.debug(
        f"{'FISTA' if momentum else 'ISTA'} lambda={lam:.4g}: {iteration} iterations, "
        f"objective={report.final_objective:.6e}, fidelity={fidelity:.6e}, "
        f"converged={converged}"
    )
    image = SpectrumImage(y.height, y.width, final, y.energy_axis)
    return image, report


def fista(
    y: Observation,
    lam: float,
    config: Optional[SolverConfig] = None,
    x0: Optional[SpectrumImage] = None,
) -> Tuple[SpectrumImage, SolverReport]:
    return _run(y, lam, config or SolverConfig(), x0, momentum=True)


def ista(
    y: Observation,
    lam: float,
    config: Optional[SolverConfig] = None,
    x0: Optional[SpectrumImage] = None,
) -> Tuple[SpectrumImage, SolverReport]:
    return _run(y, lam, config or SolverConfig(), x0, momentum=False)


def solve(
    y: Observation,
    lam: float,
    config: SolverConfig,
    x0: Optional[SpectrumImage] = None,
) -> Tuple[SpectrumImage, SolverReport]:
    """Dispatch on ``config.algorithm``."""
    return _run(y, lam, config, x0, momentum=config.algorithm == "fista")

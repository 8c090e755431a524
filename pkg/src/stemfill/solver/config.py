import math
from dataclasses import dataclass, field
from typing import Optional, Tuple, Union

from stemfill.errors import InvalidParameterError
from stemfill.utilities.dotenv import env

AUTO = "auto"
ALGORITHMS = ("fista", "ista")

# Relative iterate change is divided by max(norm, EPSILON).
EPSILON = 1e-12


def _default_max_iters() -> int:
    return env.setting("STEMFILL_MAX_ITERS")


def _default_rel_tol() -> float:
    return env.setting("STEMFILL_REL_TOL")


@dataclass(frozen=True)
class SolverConfig:
    lambda_: Union[float, str] = AUTO
    max_iters: int = field(default_factory=_default_max_iters)
    rel_tol: float = field(default_factory=_default_rel_tol)
    target_residual: Optional[float] = None
    # None means (1e-6, 1e2) times the norm of the observation.
    lambda_bracket: Optional[Tuple[float, float]] = None
    search_tol: float = 0.1
    max_probes: int = 30
    algorithm: str = "fista"

    def __post_init__(self):
        if isinstance(self.lambda_, str):
            if self.lambda_ != AUTO:
                raise InvalidParameterError("lambda", self.lambda_, "expected 'auto' or a number")
        elif not (math.isfinite(self.lambda_) and self.lambda_ >= 0):
            raise InvalidParameterError("lambda", self.lambda_, "must be finite and >= 0")
        if self.max_iters < 1:
            raise InvalidParameterError("max_iters", self.max_iters, "must be >= 1")
        if not self.rel_tol > 0:
            raise InvalidParameterError("rel_tol", self.rel_tol, "must be > 0")
        if self.target_residual is not None and not self.target_residual >= 0:
            raise InvalidParameterError(
                "target_residual", self.target_residual, "must be >= 0"
            )
        if self.lambda_bracket is not None:
            lo, hi = self.lambda_bracket
            if not (0 < lo < hi):
                raise InvalidParameterError(
                    "lambda_bracket", self.lambda_bracket, "need 0 < lo < hi"
                )
        if not (0 < self.search_tol < 1):
            raise InvalidParameterError("search_tol", self.search_tol, "must lie in (0, 1)")
        if self.max_probes < 2:
            raise InvalidParameterError("max_probes", self.max_probes, "must be >= 2")
        if self.algorithm not in ALGORITHMS:
            raise InvalidParameterError("algorithm", self.algorithm, f"one of {ALGORITHMS}")

    @property
    def auto_lambda(self) -> bool:
        return self.lambda_ == AUTO


@dataclass(frozen=True)
class SolverReport:
    iterations_run: int
    objective_trace: Tuple[float, ...]
    final_objective: float
    final_data_fidelity: float
    final_regularizer: float
    chosen_lambda: float
    converged: bool
    wall_time_s: float = 0.0
    sparsity: float = 1.0
    probes: Tuple[Tuple[float, float], ...] = ()
    pca_t: Optional[int] = None


def noise_target(sigma: float, bands: int, sampled: int) -> float:
    """Expected data fidelity 1/2 sigma^2 B N of white noise on the sampled spectra."""
    if not (math.isfinite(sigma) and sigma >= 0):
        raise InvalidParameterError("noise_sigma", sigma, "must be finite and >= 0")
    return 0.5 * sigma**2 * bands * sampled

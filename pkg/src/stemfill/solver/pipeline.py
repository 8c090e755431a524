import dataclasses
import logging
from typing import Optional, Tuple, Union

from stemfill.core import Observation, SpectrumImage
from stemfill.pca import auto_threshold, pca_backproject, pca_fit, pca_project
from stemfill.utilities.timing import Stopwatch

from .config import AUTO, SolverConfig, SolverReport
from .fista import solve
from .search import lambda_search

logger = logging.getLogger(__name__)


def _solve(y: Observation, config: SolverConfig) -> Tuple[SpectrumImage, SolverReport]:
    if config.auto_lambda:
        _, image, report = lambda_search(y, config)
        return image, report
    return solve(y, float(config.lambda_), config)


def cls_reconstruct(
    y: Observation,
    use_pca: bool = True,
    t: Union[int, str] = AUTO,
    config: Optional[SolverConfig] = None,
) -> Tuple[SpectrumImage, SolverReport]:
    """Reconstruct the full cube from ``y``, optionally in a PCA subspace."""
    config = config or SolverConfig()
    with Stopwatch() as watch:
        if not use_pca:
            image, report = _solve(y, config)
            pca_t = None
        else:
            model = pca_fit(y)
            pca_t = auto_threshold(y, model) if t == AUTO else int(t)
            model.check_t(pca_t)
            reduced = pca_project(y, model, pca_t)
            if config.target_residual is not None:
                # Isotropic noise keeps only t/B of its energy in the subspace.
                config = dataclasses.replace(
                    config, target_residual=config.target_residual * pca_t / y.bands
                )
            reduced_image, report = _solve(reduced, config)
            image = pca_backproject(reduced_image, model)
            logger.info(f"Solved in a {pca_t}-dimensional PCA subspace of {y.bands} bands")

    report = dataclasses.replace(report, wall_time_s=watch.elapsed, pca_t=pca_t)
    logger.info(
        f"CLS: lambda={report.chosen_lambda:.6g}, {report.iterations_run} iterations, "
        f"objective={report.final_objective:.6e}, {watch.elapsed:.3f}s"
    )
    return image, report

"""Dichotomic search of lambda on a data-fidelity target.

The data fidelity at the solution is non-decreasing in lambda, from ~0 at
lambda -> 0 up to 1/2 ||Y||_F^2 once the solution is the zero image. The
search bisects log10(lambda) until the fidelity lands within
``target * (1 +/- search_tol)``.
"""

import dataclasses
import logging
import math
from typing import Optional, Tuple

import numpy as np

from stemfill.core import Observation, SpectrumImage
from stemfill.errors import InvalidParameterError, LambdaSearchError

from .config import SolverConfig, SolverReport
from .fista import solve

logger = logging.getLogger(__name__)

BRACKET_LO = 1e-6
BRACKET_HI = 1e2


def default_bracket(y: Observation) -> Tuple[float, float]:
    scale = float(np.linalg.norm(y.values))
    if scale == 0.0:
        scale = 1.0
    return BRACKET_LO * scale, BRACKET_HI * scale


def lambda_search(
    y: Observation, config: SolverConfig
) -> Tuple[float, SpectrumImage, SolverReport]:
    target = config.target_residual
    if target is None:
        raise InvalidParameterError(
            "target_residual", None, "automatic lambda needs a noise-level target"
        )
    lo, hi = config.lambda_bracket or default_bracket(y)
    low_band = target * (1.0 - config.search_tol)
    high_band = target * (1.0 + config.search_tol)
    probes = []
    warm: Optional[SpectrumImage] = None

    def probe(lam: float):
        nonlocal warm
        image, report = solve(y, lam, config, warm)
        warm = image
        probes.append((lam, report.final_data_fidelity, image, report))
        logger.info(
            f"lambda probe {len(probes)}: lambda={lam:.6g} "
            f"fidelity={report.final_data_fidelity:.6g} target={target:.6g}"
        )
        return report.final_data_fidelity

    def finish(index: int):
        lam, _, image, report = probes[index]
        history = tuple((p[0], p[1]) for p in probes)
        return lam, image, dataclasses.replace(report, probes=history)

    fidelity_lo = probe(lo)
    if low_band <= fidelity_lo <= high_band:
        return finish(-1)
    if fidelity_lo > high_band:
        raise LambdaSearchError(
            "low",
            f"fidelity {fidelity_lo:.6g} at lambda={lo:.6g} already exceeds "
            f"the target {target:.6g}",
        )

    fidelity_hi = probe(hi)
    if low_band <= fidelity_hi <= high_band:
        return finish(-1)
    if fidelity_hi < low_band:
        raise LambdaSearchError(
            "high",
            f"fidelity {fidelity_hi:.6g} at lambda={hi:.6g} is still below "
            f"the target {target:.6g}",
        )

    log_lo, log_hi = math.log10(lo), math.log10(hi)
    while len(probes) < config.max_probes:
        log_mid = 0.5 * (log_lo + log_hi)
        fidelity = probe(10.0**log_mid)
        if low_band <= fidelity <= high_band:
            return finish(-1)
        if fidelity < target:
            log_lo = log_mid
        else:
            log_hi = log_mid

    closest = min(range(len(probes)), key=lambda i: abs(probes[i][1] - target))
    logger.warning(
        f"lambda search exhausted {config.max_probes} probes; "
        f"keeping lambda={probes[closest][0]:.6g}"
    )
    return finish(closest)

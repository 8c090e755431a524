"""Whiteness of principal-component planes and the stationarity rule for T.

A plane's whiteness score is the l2 norm of its normalized circular 2D
autocorrelation over all nonzero lags. Noise-like planes score close to 1,
planes with spatial structure score much higher.
"""

import logging
import math
from typing import List, Sequence

import numpy as np
from scipy import fft

from stemfill.core import Observation, embed
from stemfill.errors import DegenerateInputError, InvalidParameterError

from .model import PcaModel, pca_project

logger = logging.getLogger(__name__)

TAIL_FRACTION = 0.25
MAD_MULTIPLIER = 3.0


def autocorrelation(plane: np.ndarray) -> np.ndarray:
    """Circular autocorrelation of the mean-removed plane, normalized so r(0) = 1."""
    plane = np.asarray(plane, dtype=np.float64)
    if plane.size < 2:
        raise InvalidParameterError("plane", plane.shape, "needs at least 2 pixels")
    if np.ptp(plane) == 0.0:
        raise DegenerateInputError("Whiteness is undefined for a constant plane")
    centered = plane - plane.mean()
    spectrum = fft.fft2(centered)
    r = fft.ifft2(spectrum * np.conj(spectrum)).real
    return r / r[0, 0]


def whiteness_score(plane: np.ndarray) -> float:
    r = autocorrelation(plane)
    energy = float(np.sum(r**2)) - r[0, 0] ** 2
    return math.sqrt(max(energy, 0.0))


def select_threshold(scores: Sequence[float]) -> int:
    scores = np.asarray(scores, dtype=np.float64)
    if scores.size < 3:
        return 1
    tail = scores[-max(1, math.ceil(TAIL_FRACTION * scores.size)) :]
    median = float(np.median(tail))
    mad = float(np.median(np.abs(tail - median)))
    band = median + MAD_MULTIPLIER * mad

    # Last index that still sticks out of the stationary band.
    outside = np.flatnonzero(scores > band)
    t = int(outside[-1]) + 1 if outside.size else 0
    return min(max(t, 1), scores.size)


def pca_component_planes(y: Observation, model: PcaModel, t: int) -> List[np.ndarray]:
    """Score planes of the first ``t`` components, zero where nothing was sampled."""
    reduced = embed(pca_project(y, model, t))
    return [reduced.plane(i) for i in range(t)]


def component_scores(y: Observation, model: PcaModel) -> List[float]:
    """Whiteness of every component plane; numerically null components score 0."""
    k = model.rank
    active = model.numerical_rank()
    scores = [0.0] * k
    if active == 0:
        return scores
    for i, plane in enumerate(pca_component_planes(y, model, active)):
        try:
            scores[i] = whiteness_score(plane)
        except DegenerateInputError:
            scores[i] = 0.0
    return scores


def auto_threshold(y: Observation, model: PcaModel) -> int:
    scores = component_scores(y, model)
    t = select_threshold(scores)
    logger.info(f"Whiteness-based PCA threshold: T={t} of K={model.rank}")
    return t

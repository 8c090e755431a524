"""Spectral PCA fitted on the sampled spectra only."""

import logging
from dataclasses import dataclass
from typing import Optional

import numpy as np

from stemfill.core import Observation, SamplingMask, SpectrumImage, apply_mask
from stemfill.errors import (
    DegenerateInputError,
    DimensionMismatchError,
    InvalidParameterError,
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class PcaModel:
    mean: np.ndarray
    components: np.ndarray
    eigenvalues: np.ndarray
    energy_axis: Optional[np.ndarray] = None

    @property
    def bands(self) -> int:
        return self.components.shape[0]

    @property
    def rank(self) -> int:
        """K, the number of components kept by the fit."""
        return self.components.shape[1]

    @property
    def explained_variance_ratio(self) -> np.ndarray:
        total = float(np.sum(self.eigenvalues))
        if total == 0.0:
            return np.zeros_like(self.eigenvalues)
        return self.eigenvalues / total

    def numerical_rank(self, tolerance: float = 1e-10) -> int:
        """Number of components whose eigenvalue exceeds ``tolerance * eigenvalues[0]``."""
        if self.rank == 0 or self.eigenvalues[0] <= 0.0:
            return 0
        return int(np.sum(self.eigenvalues > tolerance * self.eigenvalues[0]))

    def check_t(self, t: int):
        if not (1 <= t <= self.rank):
            raise InvalidParameterError("t", t, f"must lie in [1, {self.rank}]")


def _sign_convention(components: np.ndarray) -> np.ndarray:
    """Flip every column so its entry of largest magnitude is positive."""
    pivots = np.argmax(np.abs(components), axis=0)
    signs = np.sign(components[pivots, np.arange(components.shape[1])])
    signs[signs == 0] = 1.0
    return components * signs


def _fit_covariance(centered: np.ndarray, k: int):
    n = centered.shape[1]
    covariance = centered @ centered.T / (n - 1)
    eigenvalues, vectors = np.linalg.eigh(covariance)
    order = np.argsort(eigenvalues, kind="stable")[::-1][:k]
    return eigenvalues[order], vectors[:, order]


def _fit_gram(centered: np.ndarray, k: int):
    # B > N: diagonalize the N x N Gram matrix and map eigenvectors back to band space.
    n = centered.shape[1]
    gram = centered.T @ centered / (n - 1)
    eigenvalues, vectors = np.linalg.eigh(gram)
    order = np.argsort(eigenvalues, kind="stable")[::-1][:k]
    mapped = centered @ vectors[:, order]
    # QR keeps the columns orthonormal even where the eigenvalue vanishes.
    q, r = np.linalg.qr(mapped)
    diagonal = np.sign(np.diag(r))
    diagonal[diagonal == 0] = 1.0
    return eigenvalues[order], q * diagonal


def pca_fit(y: Observation) -> PcaModel:
    n = y.mask.sampled_count
    if n < 2:
        raise DegenerateInputError(f"PCA needs at least 2 sampled spectra, got {n}")
    k = min(y.bands, n - 1)
    mean = y.values.mean(axis=1)
    centered = y.values - mean[:, None]

    if y.bands <= n:
        eigenvalues, components = _fit_covariance(centered, k)
    else:
        eigenvalues, components = _fit_gram(centered, k)

    # Round-off can leave null eigenvalues slightly negative.
    eigenvalues = np.maximum(eigenvalues, 0.0)
    model = PcaModel(
        mean=mean,
        components=_sign_convention(components),
        eigenvalues=eigenvalues,
        energy_axis=y.energy_axis,
    )
    logger.debug(
        f"PCA on {n} spectra x {y.bands} bands: K={k}, "
        f"numerical rank {model.numerical_rank()}"
    )
    return model


def project_values(values: np.ndarray, model: PcaModel, t: int) -> np.ndarray:
    model.check_t(t)
    if values.shape[0] != model.bands:
        raise DimensionMismatchError("spectrum length", model.bands, values.shape[0])
    return model.components[:, :t].T @ (values - model.mean[:, None])


def backproject_values(scores: np.ndarray, model: PcaModel) -> np.ndarray:
    t = scores.shape[0]
    model.check_t(t)
    return model.components[:, :t] @ scores + model.mean[:, None]


def pca_project(y: Observation, model: PcaModel, t: int) -> Observation:
    return Observation(y.mask, project_values(y.values, model, t))


def pca_backproject(x_reduced: SpectrumImage, model: PcaModel) -> SpectrumImage:
    if x_reduced.bands > model.rank:
        raise DimensionMismatchError(
            "reduced band count", f"<= {model.rank}", x_reduced.bands
        )
    return SpectrumImage(
        x_reduced.height,
        x_reduced.width,
        backproject_values(x_reduced.data, model),
        model.energy_axis,
    )


def pca_denoise(x: SpectrumImage, t: int) -> SpectrumImage:
    """Keep the first ``t`` principal components of a fully acquired cube."""
    y = apply_mask(x, SamplingMask.full(x.height, x.width))
    model = pca_fit(y)
    scores = project_values(x.data, model, t)
    return x.with_data(backproject_values(scores, model))

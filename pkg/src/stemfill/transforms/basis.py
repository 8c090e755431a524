"""Orthonormal band-by-band 2D transforms and coefficient thresholding.

The DCT is the type-II transform with orthonormal scaling (type-III inverse);
the Fourier basis is the unitary 2D DFT. Both act on every band plane
independently, i.e. they compute X Psi for a band-major cube.
"""

import logging
import math
from enum import Enum
from typing import List, Sequence, Tuple

import numpy as np
from scipy import fft

from stemfill.core import SpectrumImage
from stemfill.errors import InvalidParameterError
from stemfill.metrics import nmse

logger = logging.getLogger(__name__)

PLANE_AXES = (-2, -1)


class BasisKind(str, Enum):
    DCT2 = "dct"
    FOURIER2 = "fourier"

    @classmethod
    def parse(cls, value) -> "BasisKind":
        if isinstance(value, cls):
            return value
        try:
            return cls(str(value).strip().lower())
        except ValueError:
            raise InvalidParameterError(
                "basis", value, f"expected one of {[k.value for k in cls]}"
            )


def dct2_forward(plane: np.ndarray) -> np.ndarray:
    return fft.dctn(np.asarray(plane, dtype=np.float64), type=2, norm="ortho")


def dct2_inverse(coeffs: np.ndarray) -> np.ndarray:
    return fft.idctn(np.asarray(coeffs, dtype=np.float64), type=2, norm="ortho")


def fourier2_forward(plane: np.ndarray) -> np.ndarray:
    return fft.fft2(np.asarray(plane, dtype=np.float64), norm="ortho")


def fourier2_inverse(coeffs: np.ndarray) -> np.ndarray:
    return fft.ifft2(coeffs, norm="ortho").real


def forward_planes(planes: np.ndarray, kind: BasisKind) -> np.ndarray:
    """Transform a ``bands x height x width`` stack plane by plane."""
    if kind is BasisKind.DCT2:
        return fft.dctn(planes, type=2, norm="ortho", axes=PLANE_AXES)
    return fft.fftn(planes, norm="ortho", axes=PLANE_AXES)


def inverse_planes(coeffs: np.ndarray, kind: BasisKind) -> np.ndarray:
    if kind is BasisKind.DCT2:
        return fft.idctn(coeffs, type=2, norm="ortho", axes=PLANE_AXES)
    return fft.ifftn(coeffs, norm="ortho", axes=PLANE_AXES).real


def band_transform_forward(x: SpectrumImage, kind=BasisKind.DCT2) -> np.ndarray:
    """Coefficient cube of ``x`` as ``bands x height x width`` (complex for Fourier)."""
    return forward_planes(x.planes(), BasisKind.parse(kind))


def band_transform_inverse(
    coeffs: np.ndarray, kind=BasisKind.DCT2, energy_axis=None
) -> SpectrumImage:
    return SpectrumImage.from_planes(
        inverse_planes(coeffs, BasisKind.parse(kind)), energy_axis
    )


# Psi is orthonormal, so its adjoint is its inverse.
band_transform_adjoint = band_transform_inverse


def column_norms(coeffs: np.ndarray) -> np.ndarray:
    """l2 norm across bands of every spatial-frequency column, ``height x width``."""
    return np.sqrt(np.sum(np.abs(coeffs) ** 2, axis=0))


def _conjugate_partner(bands: int, height: int, width: int) -> np.ndarray:
    """Linear index of the conjugate-symmetric partner of every Fourier coefficient."""
    u = (-np.arange(height)) % height
    v = (-np.arange(width)) % width
    plane = (u[:, None] * width + v[None, :]).reshape(-1)
    offsets = np.arange(bands)[:, None] * (height * width)
    return (offsets + plane[None, :]).reshape(-1)


def _ranked_groups(coeffs: np.ndarray, kind: BasisKind) -> Tuple[np.ndarray, np.ndarray]:
    """Coefficient groups sorted by decreasing magnitude.

    Returns ``(group_of, order)`` where ``group_of[i]`` is the representative
    index of coefficient ``i`` and ``order`` lists representatives by rank.
    Equal magnitudes rank the smaller linear index first. For the DCT every
    coefficient is its own group; for Fourier a coefficient and its conjugate
    partner form one group so that truncation keeps the inverse real.
    """
    magnitude = np.abs(coeffs).reshape(-1)
    linear = np.arange(magnitude.size)
    if kind is BasisKind.DCT2:
        group_of = linear
        representatives = linear
    else:
        partner = _conjugate_partner(*coeffs.shape)
        group_of = np.minimum(linear, partner)
        representatives = np.flatnonzero(group_of == linear)
    order = representatives[
        np.lexsort((representatives, -magnitude[representatives]))
    ]
    return group_of, order


def _rank(x: SpectrumImage, kind: BasisKind):
    coeffs = band_transform_forward(x, kind)
    group_of, order = _ranked_groups(coeffs, kind)
    group_sizes = np.bincount(group_of, minlength=coeffs.size)
    return coeffs, group_of, order, group_sizes


def _keep_budget(ratio: float, total: int) -> int:
    if not (0.0 < ratio <= 1.0):
        raise InvalidParameterError("r", ratio, "must lie in (0, 1]")
    return min(total, math.ceil(ratio * total))


def _truncate(coeffs, group_of, order, group_sizes, budget) -> np.ndarray:
    # Keep whole groups while the running count fits in the budget.
    kept_groups = order[np.cumsum(group_sizes[order]) <= budget]
    keep = np.zeros(coeffs.size, dtype=bool)
    keep[kept_groups] = True
    keep = keep[group_of]
    flat = np.where(keep, coeffs.reshape(-1), 0)
    return flat.reshape(coeffs.shape)


def sparsity_curve(
    x: SpectrumImage, kind, ratios: Sequence[float]
) -> List[Tuple[float, float]]:
    """NMSE of the best-r-term approximation of ``x`` for every ratio in ``ratios``."""
    kind = BasisKind.parse(kind)
    coeffs, group_of, order, group_sizes = _rank(x, kind)

    curve = []
    for ratio in ratios:
        budget = _keep_budget(ratio, coeffs.size)
        truncated = _truncate(coeffs, group_of, order, group_sizes, budget)
        approx = SpectrumImage.from_planes(inverse_planes(truncated, kind))
        error = nmse(approx, x)
        logger.debug(f"{kind.value} r={ratio:g}: kept {budget} coefficients, nmse={error:.3e}")
        curve.append((float(ratio), error))
    return curve


def threshold_reconstruct(x: SpectrumImage, kind, r: float) -> Tuple[SpectrumImage, float]:
    """Keep the ceil(r*B*P) largest coefficients of the whole cube, zero the rest."""
    kind = BasisKind.parse(kind)
    coeffs, group_of, order, group_sizes = _rank(x, kind)
    budget = _keep_budget(r, coeffs.size)
    truncated = _truncate(coeffs, group_of, order, group_sizes, budget)
    approx = SpectrumImage.from_planes(inverse_planes(truncated, kind), x.energy_axis)
    return approx, nmse(approx, x)

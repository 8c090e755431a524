"""Spectrum-image, sampling mask and observation types.

A cube is stored band-major: ``data[b, p]`` is band ``b`` at the row-major
pixel ``p = row * width + col``. Every band plane is therefore a contiguous
``height * width`` slice, which is what the band-by-band transforms want.
"""

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from stemfill.errors import (
    DimensionMismatchError,
    InvalidParameterError,
    NonFiniteError,
)


def _frozen(array: np.ndarray) -> np.ndarray:
    array.setflags(write=False)
    return array


@dataclass(frozen=True, eq=False)
class SpectrumImage:
    height: int
    width: int
    data: np.ndarray
    energy_axis: Optional[np.ndarray] = None

    def __post_init__(self):
        if self.height < 1 or self.width < 1:
            raise InvalidParameterError(
                "shape", (self.height, self.width), "height and width must be >= 1"
            )
        data = np.array(self.data, dtype=np.float64, order="C")
        if data.ndim == 1:
            data = data.reshape(1, -1)
        if data.ndim != 2 or data.shape[0] < 1:
            raise DimensionMismatchError("cube data", "bands x pixels", data.shape)
        if data.shape[1] != self.pixels:
            raise DimensionMismatchError("pixel count", self.pixels, data.shape[1])
        if not np.all(np.isfinite(data)):
            raise NonFiniteError("Spectrum-image contains NaN or Inf values")
        object.__setattr__(self, "data", _frozen(data))

        if self.energy_axis is not None:
            axis = np.array(self.energy_axis, dtype=np.float64).reshape(-1)
            if axis.size != self.bands:
                raise DimensionMismatchError("energy axis", self.bands, axis.size)
            if axis.size > 1 and not np.all(np.diff(axis) > 0):
                raise InvalidParameterError(
                    "energy_axis", "...", "must be strictly increasing"
                )
            object.__setattr__(self, "energy_axis", _frozen(axis))

    @property
    def bands(self) -> int:
        return self.data.shape[0]

    @property
    def pixels(self) -> int:
        return self.height * self.width

    @property
    def shape(self):
        return (self.height, self.width, self.bands)

    def plane(self, band: int) -> np.ndarray:
        return self.data[band].reshape(self.height, self.width)

    def planes(self) -> np.ndarray:
        """All bands as a ``bands x height x width`` view."""
        return self.data.reshape(self.bands, self.height, self.width)

    def to_cube(self) -> np.ndarray:
        """``height x width x bands`` copy, the layout most imaging code expects."""
        return np.ascontiguousarray(np.moveaxis(self.planes(), 0, -1))

    @classmethod
    def from_cube(cls, cube: np.ndarray, energy_axis=None) -> "SpectrumImage":
        cube = np.asarray(cube, dtype=np.float64)
        if cube.ndim == 2:
            cube = cube[:, :, None]
        if cube.ndim != 3:
            raise DimensionMismatchError("cube", "height x width x bands", cube.shape)
        height, width, bands = cube.shape
        data = np.moveaxis(cube, -1, 0).reshape(bands, height * width)
        return cls(height, width, data, energy_axis)

    @classmethod
    def from_planes(cls, planes: np.ndarray, energy_axis=None) -> "SpectrumImage":
        planes = np.asarray(planes, dtype=np.float64)
        bands, height, width = planes.shape
        return cls(height, width, planes.reshape(bands, height * width), energy_axis)

    def with_data(self, data: np.ndarray, keep_axis: bool = True) -> "SpectrumImage":
        """Same grid, new values. The energy axis is dropped if the band count changes."""
        data = np.asarray(data, dtype=np.float64)
        axis = self.energy_axis
        if not keep_axis or axis is None or data.shape[0] != self.bands:
            axis = None
        return SpectrumImage(self.height, self.width, data, axis)

    def same_grid(self, other: "SpectrumImage") -> bool:
        return self.height == other.height and self.width == other.width


@dataclass(frozen=True, eq=False)
class SamplingMask:
    height: int
    width: int
    sampled: np.ndarray
    _indices: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        if self.height < 1 or self.width < 1:
            raise InvalidParameterError(
                "shape", (self.height, self.width), "height and width must be >= 1"
            )
        sampled = np.asarray(self.sampled).astype(bool).reshape(-1)
        if sampled.size != self.height * self.width:
            raise DimensionMismatchError(
                "mask size", self.height * self.width, sampled.size
            )
        indices = np.flatnonzero(sampled)
        if indices.size < 1:
            raise InvalidParameterError("mask", 0, "at least one pixel must be sampled")
        object.__setattr__(self, "sampled", _frozen(sampled.copy()))
        object.__setattr__(self, "_indices", _frozen(indices))

    @classmethod
    def from_indices(cls, height: int, width: int, indices) -> "SamplingMask":
        sampled = np.zeros(height * width, dtype=bool)
        indices = np.asarray(indices, dtype=np.int64)
        if indices.size and (indices.min() < 0 or indices.max() >= sampled.size):
            raise InvalidParameterError(
                "indices", "...", f"must lie in [0, {sampled.size})"
            )
        sampled[indices] = True
        return cls(height, width, sampled)

    @classmethod
    def full(cls, height: int, width: int) -> "SamplingMask":
        return cls(height, width, np.ones(height * width, dtype=bool))

    @property
    def indices(self) -> np.ndarray:
        """Sampled row-major pixel indices, ascending; column ``j`` of Phi selects ``indices[j]``."""
        return self._indices

    @property
    def pixels(self) -> int:
        return self.height * self.width

    @property
    def sampled_count(self) -> int:
        return int(self._indices.size)

    @property
    def ratio(self) -> float:
        return self.sampled_count / self.pixels

    @property
    def coordinates(self) -> np.ndarray:
        """``N x 2`` array of (row, col) for the sampled pixels, in Phi order."""
        rows, cols = np.divmod(self._indices, self.width)
        return np.column_stack([rows, cols])

    def selection_matrix(self) -> np.ndarray:
        """Dense Phi (P x N). Only meant for small instances and tests."""
        phi = np.zeros((self.pixels, self.sampled_count))
        phi[self._indices, np.arange(self.sampled_count)] = 1.0
        return phi

    def as_plane(self) -> np.ndarray:
        return self.sampled.reshape(self.height, self.width)


@dataclass(frozen=True, eq=False)
class Observation:
    mask: SamplingMask
    values: np.ndarray
    energy_axis: Optional[np.ndarray] = None

    def __post_init__(self):
        values = np.array(self.values, dtype=np.float64, order="C")
        if values.ndim == 1:
            values = values.reshape(1, -1)
        if values.ndim != 2 or values.shape[1] != self.mask.sampled_count:
            raise DimensionMismatchError(
                "observation columns", self.mask.sampled_count, values.shape
            )
        if not np.all(np.isfinite(values)):
            raise NonFiniteError("Observation contains NaN or Inf values")
        object.__setattr__(self, "values", _frozen(values))

    @property
    def bands(self) -> int:
        return self.values.shape[0]

    @property
    def height(self) -> int:
        return self.mask.height

    @property
    def width(self) -> int:
        return self.mask.width

    def with_values(self, values: np.ndarray) -> "Observation":
        values = np.asarray(values, dtype=np.float64)
        axis = self.energy_axis
        if axis is not None and (values.ndim != 2 or values.shape[0] != self.bands):
            axis = None
        return Observation(self.mask, values, axis)


def apply_mask(x: SpectrumImage, mask: SamplingMask) -> Observation:
    """Y = X Phi: keep the spectra of the sampled pixels, in mask order."""
    if not (x.height == mask.height and x.width == mask.width):
        raise DimensionMismatchError(
            "mask shape", (x.height, x.width), (mask.height, mask.width)
        )
    return Observation(mask, x.data[:, mask.indices], x.energy_axis)


def embed(y: Observation) -> SpectrumImage:
    """Y Phi^T: observed spectra at their pixels, zeros everywhere else."""
    data = np.zeros((y.bands, y.mask.pixels))
    data[:, y.mask.indices] = y.values
    return SpectrumImage(y.height, y.width, data, y.energy_axis)

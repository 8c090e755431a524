"""Nearest-neighbour and inverse-distance-weighted inpainting.

Distances are Euclidean on integer (row, col) coordinates. Among samples at
the same distance the one with the smaller row-major index wins, which makes
both baselines independent of how the samples are ordered.
"""

import logging

import numpy as np
from scipy.spatial import cKDTree

from stemfill.core import Observation, SpectrumImage
from stemfill.errors import InvalidParameterError

logger = logging.getLogger(__name__)

DEFAULT_K = 4


def _squared_distances(points: np.ndarray, samples: np.ndarray, neighbors: np.ndarray):
    delta = points[:, None, :] - samples[neighbors]
    return np.sum(delta * delta, axis=-1)


def nearest_samples(y: Observation, points: np.ndarray, k: int):
    """``k`` nearest sampled pixels of every point, as (sample indices, distances).

    Rows are sorted by distance, then by sample index.
    """
    samples = y.mask.coordinates
    n = samples.shape[0]
    tree = cKDTree(samples)
    probe = min(k + 1, n)
    _, neighbors = tree.query(points, k=probe)
    neighbors = np.asarray(neighbors).reshape(len(points), probe)
    squared = _squared_distances(points, samples, neighbors)

    # Re-sort exactly on integer squared distance, then on sample index.
    order = np.lexsort((neighbors, squared), axis=1)
    neighbors = np.take_along_axis(neighbors, order, axis=1)
    squared = np.take_along_axis(squared, order, axis=1)

    if probe > k:
        # A tie straddling the k-th slot may hide smaller-index samples further out.
        tied = np.flatnonzero(squared[:, k] == squared[:, k - 1])
        for i in tied:
            radius = np.sqrt(squared[i, k - 1]) * (1 + 1e-9) + 1e-9
            candidates = np.asarray(tree.query_ball_point(points[i], radius))
            dist = np.sum((samples[candidates] - points[i]) ** 2, axis=-1)
            best = candidates[np.lexsort((candidates, dist))][:probe]
            neighbors[i, : best.size] = best
            squared[i, : best.size] = np.sum((samples[best] - points[i]) ** 2, axis=-1)

    return neighbors[:, :k], np.sqrt(squared[:, :k].astype(np.float64))


def _unsampled_points(y: Observation):
    missing = np.flatnonzero(~y.mask.sampled)
    rows, cols = np.divmod(missing, y.width)
    return missing, np.column_stack([rows, cols])


def weighted_nn_reconstruct(y: Observation, k: int = DEFAULT_K) -> SpectrumImage:
    n = y.mask.sampled_count
    if not (1 <= k <= n):
        raise InvalidParameterError("k", k, f"must lie in [1, {n}]")
    data = np.zeros((y.bands, y.mask.pixels))
    data[:, y.mask.indices] = y.values

    missing, points = _unsampled_points(y)
    if missing.size:
        neighbors, distances = nearest_samples(y, points, k)
        weights = 1.0 / distances
        weights /= weights.sum(axis=1, keepdims=True)
        data[:, missing] = np.einsum("bmk,mk->bm", y.values[:, neighbors], weights)
    logger.debug(f"Filled {missing.size} pixels from {n} samples (k={k})")
    return SpectrumImage(y.height, y.width, data, y.energy_axis)


def nn_reconstruct(y: Observation) -> SpectrumImage:
    return weighted_nn_reconstruct(y, k=1)

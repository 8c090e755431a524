from .interpolation import (
    DEFAULT_K,
    nearest_samples,
    nn_reconstruct,
    weighted_nn_reconstruct,
)

__all__ = [
    "DEFAULT_K",
    "nearest_samples",
    "nn_reconstruct",
    "weighted_nn_reconstruct",
]

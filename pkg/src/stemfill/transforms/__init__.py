from .basis import (
    BasisKind,
    band_transform_adjoint,
    band_transform_forward,
    band_transform_inverse,
    column_norms,
    dct2_forward,
    dct2_inverse,
    forward_planes,
    fourier2_forward,
    fourier2_inverse,
    inverse_planes,
    sparsity_curve,
    threshold_reconstruct,
)

__all__ = [
    "BasisKind",
    "band_transform_adjoint",
    "band_transform_forward",
    "band_transform_inverse",
    "column_norms",
    "dct2_forward",
    "dct2_inverse",
    "forward_planes",
    "fourier2_forward",
    "fourier2_inverse",
    "inverse_planes",
    "sparsity_curve",
    "threshold_reconstruct",
]

from .cube import Observation, SamplingMask, SpectrumImage, apply_mask, embed
from .storage import (
    load_cube,
    load_mask,
    load_metadata,
    store_cube,
    store_mask,
    store_metadata,
)

__all__ = [
    "Observation",
    "SamplingMask",
    "SpectrumImage",
    "apply_mask",
    "embed",
    "load_cube",
    "load_mask",
    "load_metadata",
    "store_cube",
    "store_mask",
    "store_metadata",
]

from .generate import (
    Lattice,
    MixingModel,
    SynthParams,
    SyntheticDataset,
    add_noise,
    generate_abundances,
    generate_dataset,
    generate_spectra,
    make_mask,
    mix,
    noise_sigma,
)

__all__ = [
    "Lattice",
    "MixingModel",
    "SynthParams",
    "SyntheticDataset",
    "add_noise",
    "generate_abundances",
    "generate_dataset",
    "generate_spectra",
    "make_mask",
    "mix",
    "noise_sigma",
]

import os
import tempfile

import numpy as np

from stemfill.core import SamplingMask, SpectrumImage, apply_mask
from stemfill.synth import MixingModel, generate_abundances, generate_spectra, make_mask, mix


def random_image(height, width, bands, seed=0, positive=False) -> SpectrumImage:
    rng = np.random.default_rng(seed)
    data = rng.standard_normal((bands, height * width))
    if positive:
        data = np.abs(data) + 0.1
    return SpectrumImage(height, width, data)


def random_observation(height, width, bands, ratio=0.5, seed=0):
    x = random_image(height, width, bands, seed)
    mask = make_mask(height, width, ratio, seed)
    return x, apply_mask(x, mask)


def full_observation(x: SpectrumImage):
    return apply_mask(x, SamplingMask.full(x.height, x.width))


def rank_four_image(height=24, width=28, bands=16, seed=0) -> SpectrumImage:
    """Noise-free mixture of four spectra whose centred rank is exactly four.

    Sum-to-one abundances lose one dimension once the mean is removed, so each
    pixel is scaled by a smooth thickness field that breaks the constraint.
    """
    spectra = generate_spectra(bands, 4, seed)
    abundances = generate_abundances(height, width, 4, seed=seed)
    rows, cols = np.indices((height, width))
    thickness = 1.0 + 0.3 * np.cos(2 * np.pi * rows / height) * np.sin(2 * np.pi * cols / width)
    return mix(MixingModel(spectra, abundances * thickness.ravel()[None, :], height, width))


def line_image(values) -> SpectrumImage:
    """1 x len(values) single-band image."""
    return SpectrumImage(1, len(values), np.asarray(values, dtype=np.float64)[None, :])


def make_temp_dir(testcase) -> str:
    directory = tempfile.TemporaryDirectory()
    testcase.addCleanup(directory.cleanup)
    return directory.name


def temp_path(directory, name) -> str:
    return os.path.join(directory, name)

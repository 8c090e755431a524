"""Synthetic spectrum-images: X = M A plus calibrated white noise.

Spectra are parametric EELS-like signatures (decaying background, sigmoid
edge onsets with white-line peaks). Abundance maps are Gaussian blobs on a
periodic lattice, phase-shifted per component, over a low-frequency cosine
background, normalized to sum to one at every pixel.
"""

import logging
import math
from dataclasses import asdict, dataclass, field
from typing import Optional

import numpy as np

from stemfill.core import SamplingMask, SpectrumImage
from stemfill.errors import DimensionMismatchError, InvalidParameterError
from stemfill.utilities.rng import generator

logger = logging.getLogger(__name__)

MIN_BANDS = 8
MIN_ANGLE = 0.1
MAX_DRAWS = 100
BACKGROUND_WEIGHT = 0.3


@dataclass(frozen=True)
class Lattice:
    period_x: float = 9.5
    period_y: float = 8.5
    blob_sigma: float = 1.8

    def __post_init__(self):
        if self.period_x < 2 or self.period_y < 2:
            raise InvalidParameterError(
                "lattice", (self.period_x, self.period_y), "periods must be >= 2 pixels"
            )
        if not self.blob_sigma > 0:
            raise InvalidParameterError("blob_sigma", self.blob_sigma, "must be > 0")


@dataclass(frozen=True)
class SynthParams:
    height: int = 70
    width: int = 120
    bands: int = 128
    components: int = 4
    snr_db: float = 25.0
    lattice: Lattice = field(default_factory=Lattice)
    energy_start: float = 400.0
    energy_stop: float = 1800.0

    def energy_axis(self) -> np.ndarray:
        return np.linspace(self.energy_start, self.energy_stop, self.bands)

    def as_dict(self):
        return asdict(self)


@dataclass(frozen=True, eq=False)
class MixingModel:
    spectra: np.ndarray
    abundances: np.ndarray
    height: int
    width: int

    def __post_init__(self):
        if self.spectra.ndim != 2 or self.spectra.shape[1] < 1:
            raise DimensionMismatchError("spectra", "bands x components", self.spectra.shape)
        expected = (self.spectra.shape[1], self.height * self.width)
        if self.abundances.shape != expected:
            raise DimensionMismatchError("abundances", expected, self.abundances.shape)
        if not np.all(np.isfinite(self.abundances)) or np.any(self.abundances < 0):
            raise InvalidParameterError("abundances", "...", "must be finite and >= 0")

    @property
    def components(self) -> int:
        return self.spectra.shape[1]

    def abundance_map(self, i: int) -> np.ndarray:
        return self.abundances[i].reshape(self.height, self.width)


@dataclass(frozen=True, eq=False)
class SyntheticDataset:
    clean: SpectrumImage
    noisy: SpectrumImage
    sigma: float
    model: MixingModel
    params: SynthParams
    seed: int

    def metadata(self):
        return {
            "seed": self.seed,
            "sigma": self.sigma,
            "snr_db": self.params.snr_db,
            "params": self.params.as_dict(),
        }


def _sigmoid(x: np.ndarray) -> np.ndarray:
    return 0.5 * (1.0 + np.tanh(0.5 * x))


def _spectrum(e: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    decay = rng.uniform(0.2, 0.6)
    signal = rng.uniform(0.5, 1.0) * np.exp(-e / decay)
    edges = int(rng.integers(1, 4))
    onsets = np.sort(rng.choice(np.linspace(0.1, 0.9, 17), size=edges, replace=False))
    for onset in onsets:
        width = rng.uniform(0.01, 0.03)
        height = rng.uniform(0.2, 0.8)
        tail = rng.uniform(0.2, 0.8)
        step = _sigmoid((e - onset) / width) * np.exp(-np.maximum(e - onset, 0.0) / tail)
        peak = rng.uniform(0.1, 0.6) * np.exp(
            -((e - onset - 2 * width) ** 2) / (2 * (1.5 * width) ** 2)
        )
        signal = signal + height * step + peak
    return signal


def _min_pairwise_angle(m: np.ndarray) -> float:
    if m.shape[1] < 2:
        return math.pi
    unit = m / np.linalg.norm(m, axis=0)
    cosine = np.clip(unit.T @ unit, -1.0, 1.0)
    upper = np.triu_indices(m.shape[1], k=1)
    return float(np.min(np.arccos(cosine[upper])))


def generate_spectra(b: int, nc: int, seed: int) -> np.ndarray:
    if nc < 1:
        raise InvalidParameterError("components", nc, "must be >= 1")
    if b < MIN_BANDS:
        raise InvalidParameterError("bands", b, f"must be >= {MIN_BANDS}")
    rng = generator(seed, "spectra")
    e = np.linspace(0.0, 1.0, b)
    for _ in range(MAX_DRAWS):
        m = np.column_stack([_spectrum(e, rng) for _ in range(nc)])
        if _min_pairwise_angle(m) >= MIN_ANGLE:
            return m
    raise InvalidParameterError(
        "components", nc, f"could not draw {nc} distinct spectra on {b} bands"
    )


def _periodic_profile(n: int, period: float, phase: float, sigma: float) -> np.ndarray:
    """Sum of unit Gaussians centred at ``phase + k * period`` along one axis."""
    coords = np.arange(n, dtype=np.float64)
    margin = 2 * period + 3 * sigma
    first = math.floor((-margin - phase) / period)
    last = math.ceil((n + margin - phase) / period)
    centres = phase + period * np.arange(first, last + 1)
    return np.exp(-((coords[:, None] - centres[None, :]) ** 2) / (2 * sigma**2)).sum(axis=1)


def _background(h: int, w: int, rng: np.random.Generator) -> np.ndarray:
    fy, fx = rng.choice([0.5, 1.0, 1.5], size=2)
    py, px = rng.uniform(0, 2 * math.pi, size=2)
    rows = np.cos(2 * math.pi * fy * np.arange(h) / h + py)
    cols = np.cos(2 * math.pi * fx * np.arange(w) / w + px)
    return 1.0 + 0.5 * rows[:, None] * cols[None, :]


def generate_abundances(
    h: int, w: int, nc: int, lattice: Optional[Lattice] = None, seed: int = 0
) -> np.ndarray:
    lattice = lattice or Lattice()
    if nc < 1:
        raise InvalidParameterError("components", nc, "must be >= 1")
    rng = generator(seed, "abundances")
    raw = np.empty((nc, h, w))
    for i in range(nc):
        shift = i / nc
        blobs = np.outer(
            _periodic_profile(h, lattice.period_y, shift * lattice.period_y, lattice.blob_sigma),
            _periodic_profile(w, lattice.period_x, shift * lattice.period_x, lattice.blob_sigma),
        )
        raw[i] = BACKGROUND_WEIGHT * _background(h, w, rng) + blobs
    abundances = raw / raw.sum(axis=0, keepdims=True)
    return abundances.reshape(nc, h * w)


def mix(model: MixingModel, energy_axis=None) -> SpectrumImage:
    return SpectrumImage(
        model.height, model.width, model.spectra @ model.abundances, energy_axis
    )


def noise_sigma(x: SpectrumImage, snr_db: float) -> float:
    if math.isinf(snr_db) and snr_db > 0:
        return 0.0
    energy = float(np.sum(x.data**2))
    if energy == 0.0:
        raise InvalidParameterError("image", "zero", "cannot calibrate noise on an all-zero image")
    return math.sqrt(energy / (x.data.size * 10.0 ** (snr_db / 10.0)))


def add_noise(x: SpectrumImage, snr_db: float, seed: int) -> SpectrumImage:
    sigma = noise_sigma(x, snr_db)
    if sigma == 0.0:
        return x
    noise = generator(seed, "noise").normal(0.0, sigma, size=x.data.shape)
    return x.with_data(x.data + noise)


def make_mask(h: int, w: int, ratio: float, seed: int) -> SamplingMask:
    if not (0.0 < ratio <= 1.0):
        raise InvalidParameterError("ratio", ratio, "must lie in (0, 1]")
    pixels = h * w
    count = int(math.floor(ratio * pixels + 0.5))
    if count == 0:
        raise InvalidParameterError(
            "ratio", ratio, f"samples no pixel of a {h}x{w} image after rounding"
        )
    chosen = generator(seed, "mask").permutation(pixels)[:count]
    return SamplingMask.from_indices(h, w, np.sort(chosen))


def generate_dataset(params: Optional[SynthParams] = None, seed: int = 0) -> SyntheticDataset:
    params = params or SynthParams()
    spectra = generate_spectra(params.bands, params.components, seed)
    abundances = generate_abundances(
        params.height, params.width, params.components, params.lattice, seed
    )
    model = MixingModel(spectra, abundances, params.height, params.width)
    clean = mix(model, params.energy_axis())
    sigma = noise_sigma(clean, params.snr_db)
    noisy = add_noise(clean, params.snr_db, seed)
    logger.info(
        f"Synthesized {params.height}x{params.width}x{params.bands} cube, "
        f"{params.components} components, sigma={sigma:.4g}"
    )
    return SyntheticDataset(clean, noisy, sigma, model, params, seed)

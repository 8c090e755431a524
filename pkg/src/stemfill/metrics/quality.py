import math
from dataclasses import asdict, dataclass

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from stemfill.core import SpectrumImage
from stemfill.errors import DegenerateInputError, DimensionMismatchError

SSIM_WINDOW = 8
SSIM_K1 = 0.01
SSIM_K2 = 0.03
# Spectra shorter than this fraction of the image RMS have no direction.
ASAD_NORM_FLOOR = 1e-12


@dataclass(frozen=True)
class MetricsReport:
    method: str
    nmse: float
    snr_db: float
    asad_rad: float
    ssim: float
    wall_time_s: float = 0.0

    def as_dict(self):
        return asdict(self)


def _check_shapes(rec: SpectrumImage, ref: SpectrumImage):
    if rec.shape != ref.shape:
        raise DimensionMismatchError("image shape", ref.shape, rec.shape)


def nmse(rec: SpectrumImage, ref: SpectrumImage) -> float:
    _check_shapes(rec, ref)
    reference_energy = float(np.sum(ref.data**2))
    if reference_energy == 0.0:
        raise DegenerateInputError("NMSE is undefined for an all-zero reference")
    return float(np.sum((rec.data - ref.data) ** 2)) / reference_energy


def snr_from_nmse(error: float) -> float:
    if error <= 0.0:
        return math.inf
    return -10.0 * math.log10(error)


def snr(rec: SpectrumImage, ref: SpectrumImage) -> float:
    return snr_from_nmse(nmse(rec, ref))


def _spectrum_norms(image: SpectrumImage, label: str) -> np.ndarray:
    norms = np.linalg.norm(image.data, axis=0)
    rms = math.sqrt(float(np.mean(image.data**2)))
    degenerate = np.flatnonzero(norms <= ASAD_NORM_FLOOR * rms)
    if degenerate.size:
        pixel = int(degenerate[0])
        row, col = divmod(pixel, image.width)
        raise DegenerateInputError(
            f"Zero-norm spectrum in {label} at pixel {pixel} (row {row}, col {col})"
        )
    return norms


def spectral_angles(rec: SpectrumImage, ref: SpectrumImage) -> np.ndarray:
    """Per-pixel angle between the two spectra, radians."""
    _check_shapes(rec, ref)
    rec_norms = _spectrum_norms(rec, "reconstruction")
    ref_norms = _spectrum_norms(ref, "reference")
    # Half-angle form stays accurate near 0 and pi, where arccos does not.
    u = rec.data / rec_norms
    v = ref.data / ref_norms
    return 2.0 * np.arctan2(np.linalg.norm(u - v, axis=0), np.linalg.norm(u + v, axis=0))


def asad(rec: SpectrumImage, ref: SpectrumImage) -> float:
    return float(np.mean(spectral_angles(rec, ref)))


def _windows(plane: np.ndarray) -> np.ndarray:
    return sliding_window_view(plane, (SSIM_WINDOW, SSIM_WINDOW))


def ssim_plane(rec: np.ndarray, ref: np.ndarray) -> float:
    """Mean SSIM over every 8x8 window (stride 1) of one band."""
    dynamic_range = float(ref.max() - ref.min())
    if dynamic_range == 0.0:
        # Flat reference band: fall back to unit range so the constants stay positive.
        dynamic_range = 1.0
    c1 = (SSIM_K1 * dynamic_range) ** 2
    c2 = (SSIM_K2 * dynamic_range) ** 2

    x = _windows(rec)
    y = _windows(ref)
    mu_x = x.mean(axis=(-2, -1))
    mu_y = y.mean(axis=(-2, -1))
    dx = x - mu_x[..., None, None]
    dy = y - mu_y[..., None, None]
    var_x = (dx**2).mean(axis=(-2, -1))
    var_y = (dy**2).mean(axis=(-2, -1))
    cov = (dx * dy).mean(axis=(-2, -1))

    luminance = (2 * mu_x * mu_y + c1) / (mu_x**2 + mu_y**2 + c1)
    structure = (2 * cov + c2) / (var_x + var_y + c2)
    return float(np.mean(luminance * structure))


def ssim_bands(rec: SpectrumImage, ref: SpectrumImage) -> np.ndarray:
    _check_shapes(rec, ref)
    if rec.height < SSIM_WINDOW or rec.width < SSIM_WINDOW:
        raise DimensionMismatchError(
            "SSIM window",
            f">= {SSIM_WINDOW}x{SSIM_WINDOW} image",
            (rec.height, rec.width),
        )
    return np.array([ssim_plane(rec.plane(b), ref.plane(b)) for b in range(rec.bands)])


def ssim_band_mean(rec: SpectrumImage, ref: SpectrumImage) -> float:
    return float(np.mean(ssim_bands(rec, ref)))


def evaluate(
    rec: SpectrumImage, ref: SpectrumImage, method: str, wall_time_s: float = 0.0
) -> MetricsReport:
    error = nmse(rec, ref)
    return MetricsReport(
        method=method,
        nmse=error,
        snr_db=snr_from_nmse(error),
        asad_rad=asad(rec, ref),
        ssim=ssim_band_mean(rec, ref),
        wall_time_s=float(wall_time_s),
    )

from .quality import (
    MetricsReport,
    asad,
    evaluate,
    nmse,
    snr,
    snr_from_nmse,
    spectral_angles,
    ssim_band_mean,
    ssim_bands,
    ssim_plane,
)
from .report import (
    BASIS_SCAN_COLUMNS,
    METRICS_COLUMNS,
    RECONSTRUCT_COLUMNS,
    append_report_row,
    append_rows,
)

__all__ = [
    "BASIS_SCAN_COLUMNS",
    "METRICS_COLUMNS",
    "MetricsReport",
    "RECONSTRUCT_COLUMNS",
    "append_report_row",
    "append_rows",
    "asad",
    "evaluate",
    "nmse",
    "snr",
    "snr_from_nmse",
    "spectral_angles",
    "ssim_band_mean",
    "ssim_bands",
    "ssim_plane",
]

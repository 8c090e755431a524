"""Header-once CSV rows for batch experiments."""

import csv
import os
from typing import Any, Dict, Iterable, List, Optional

from stemfill.errors import StorageError

from .quality import MetricsReport

METRICS_COLUMNS = ["method", "nmse", "snr_db", "asad_rad", "ssim", "wall_time_s"]
RECONSTRUCT_COLUMNS = METRICS_COLUMNS + ["iterations", "lambda", "objective", "pca_t"]
BASIS_SCAN_COLUMNS = ["basis", "r", "nmse"]


def format_value(value: Any) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        # repr round-trips exactly, so rows are reproducible bit for bit.
        return repr(value)
    return str(value)


def _existing_header(path) -> Optional[List[str]]:
    if not os.path.exists(path) or os.path.getsize(path) == 0:
        return None
    with open(path, newline="") as f:
        return next(csv.reader(f), None)


def append_rows(path, columns: List[str], rows: Iterable[Dict[str, Any]]):
    try:
        header = _existing_header(path)
        if header is not None and header != columns:
            raise StorageError(
                f"{path} has columns {header}, refusing to append rows with {columns}"
            )
        with open(path, "a", newline="") as f:
            writer = csv.writer(f, lineterminator="\n")
            if header is None:
                writer.writerow(columns)
            for row in rows:
                writer.writerow([format_value(row.get(column)) for column in columns])
    except OSError as e:
        raise StorageError(f"Cannot write {path}: {e}") from e


def append_report_row(
    path, report: MetricsReport, extra: Optional[Dict[str, Any]] = None
):
    row = report.as_dict()
    columns = METRICS_COLUMNS
    if extra is not None:
        row.update(extra)
        columns = RECONSTRUCT_COLUMNS
    append_rows(path, columns, [row])

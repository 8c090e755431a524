"""Bit-exact cube and mask files.

Both formats are a single-line JSON header terminated by ``\\n`` followed by a
raw payload::

    {"magic":"SSI1","height":H,"width":W,"bands":B,"dtype":"f32le","order":"band-major"}\\n
    <B*H*W little-endian float32>

Masks use ``"dtype":"u8"``, ``"bands":1`` and ``"order":"row-major"`` with one
0/1 byte per pixel.
"""

import logging
from typing import Any, Dict

import numpy as np
import orjson

from stemfill.errors import (
    DimensionOverflowError,
    MalformedHeaderError,
    NonFiniteError,
    StorageError,
    TrailingPayloadError,
    TruncatedPayloadError,
)

from .cube import SamplingMask, SpectrumImage

logger = logging.getLogger(__name__)

MAGIC = "SSI1"
CUBE_DTYPE = "f32le"
MASK_DTYPE = "u8"
ITEM_SIZE = {CUBE_DTYPE: 4, MASK_DTYPE: 1}
NUMPY_DTYPE = {CUBE_DTYPE: np.dtype("<f4"), MASK_DTYPE: np.dtype("u1")}
ORDER = {CUBE_DTYPE: "band-major", MASK_DTYPE: "row-major"}
MAX_HEADER_BYTES = 1 << 20
# 16 GiB; anything larger is almost certainly a corrupt header.
MAX_PAYLOAD_BYTES = 1 << 34


def _read(path) -> bytes:
    try:
        with open(path, "rb") as f:
            return f.read()
    except OSError as e:
        raise StorageError(f"Cannot read {path}: {e}") from e


def _write(path, blob: bytes):
    try:
        with open(path, "wb") as f:
            f.write(blob)
    except OSError as e:
        raise StorageError(f"Cannot write {path}: {e}") from e


def _encode_header(height: int, width: int, bands: int, dtype: str, extra=None) -> bytes:
    header = {
        "magic": MAGIC,
        "height": height,
        "width": width,
        "bands": bands,
        "dtype": dtype,
        "order": ORDER[dtype],
    }
    if extra:
        header.update(extra)
    return orjson.dumps(header) + b"\n"


def _split(path, blob: bytes, dtype: str):
    newline = blob.find(b"\n", 0, MAX_HEADER_BYTES)
    if newline < 0:
        raise MalformedHeaderError(f"No header line found in {path}")
    try:
        header = orjson.loads(blob[:newline])
    except orjson.JSONDecodeError as e:
        raise MalformedHeaderError(f"Header of {path} is not valid JSON: {e}") from e
    if not isinstance(header, dict):
        raise MalformedHeaderError(f"Header of {path} is not a JSON object")
    if header.get("magic") != MAGIC:
        raise MalformedHeaderError(f"Bad magic in {path}: {header.get('magic')!r}")
    if header.get("dtype") != dtype:
        raise MalformedHeaderError(
            f"Expected dtype {dtype!r} in {path}, got {header.get('dtype')!r}"
        )
    if header.get("order") != ORDER[dtype]:
        raise MalformedHeaderError(
            f"Expected order {ORDER[dtype]!r} in {path}, got {header.get('order')!r}"
        )

    dims = []
    for key in ("height", "width", "bands"):
        value = header.get(key)
        if isinstance(value, bool) or not isinstance(value, int) or value < 1:
            raise MalformedHeaderError(f"Header field {key!r} in {path} is {value!r}")
        dims.append(value)
    height, width, bands = dims
    if dtype == MASK_DTYPE and bands != 1:
        raise MalformedHeaderError(f"Mask {path} declares {bands} bands")

    expected = height * width * bands * ITEM_SIZE[dtype]
    if expected > MAX_PAYLOAD_BYTES:
        raise DimensionOverflowError(
            f"{path} declares {height}x{width}x{bands}, "
            f"{expected} bytes exceeds the {MAX_PAYLOAD_BYTES} byte limit"
        )
    payload = blob[newline + 1 :]
    if len(payload) < expected:
        raise TruncatedPayloadError(path, expected, len(payload))
    if len(payload) > expected:
        raise TrailingPayloadError(path, expected, len(payload))
    return header, payload


def store_cube(x: SpectrumImage, path):
    payload = x.data.astype(NUMPY_DTYPE[CUBE_DTYPE])
    if not np.all(np.isfinite(payload)):
        raise NonFiniteError(f"Values of {path} overflow float32")
    extra = None
    if x.energy_axis is not None:
        extra = {"energy_axis": [float(v) for v in x.energy_axis]}
    header = _encode_header(x.height, x.width, x.bands, CUBE_DTYPE, extra)
    _write(path, header + payload.tobytes())
    logger.debug(f"Stored {x.height}x{x.width}x{x.bands} cube to {path}")


def _energy_axis(path, header: Dict[str, Any], bands: int):
    axis = header.get("energy_axis")
    if axis is None:
        return None
    if not isinstance(axis, list) or any(
        isinstance(v, bool) or not isinstance(v, (int, float)) for v in axis
    ):
        raise MalformedHeaderError(f"energy_axis in {path} must be a list of numbers")
    if len(axis) != bands:
        raise MalformedHeaderError(
            f"energy_axis in {path} has {len(axis)} entries for {bands} bands"
        )
    axis = np.asarray(axis, dtype=np.float64)
    if axis.size > 1 and not np.all(np.diff(axis) > 0):
        raise MalformedHeaderError(f"energy_axis in {path} is not strictly increasing")
    return axis


def load_cube(path) -> SpectrumImage:
    header, payload = _split(path, _read(path), CUBE_DTYPE)
    data = np.frombuffer(payload, dtype=NUMPY_DTYPE[CUBE_DTYPE]).astype(np.float64)
    data = data.reshape(header["bands"], header["height"] * header["width"])
    if not np.all(np.isfinite(data)):
        raise NonFiniteError(f"{path} contains NaN or Inf values")
    return SpectrumImage(
        header["height"], header["width"], data, _energy_axis(path, header, header["bands"])
    )


def store_mask(mask: SamplingMask, path):
    header = _encode_header(mask.height, mask.width, 1, MASK_DTYPE)
    _write(path, header + mask.sampled.astype(np.uint8).tobytes())
    logger.debug(f"Stored mask with {mask.sampled_count} samples to {path}")


def load_mask(path) -> SamplingMask:
    header, payload = _split(path, _read(path), MASK_DTYPE)
    sampled = np.frombuffer(payload, dtype=np.uint8)
    if np.any(sampled > 1):
        raise MalformedHeaderError(f"Mask payload of {path} holds values other than 0/1")
    return SamplingMask(header["height"], header["width"], sampled.astype(bool))


def store_metadata(meta: Dict[str, Any], path):
    blob = orjson.dumps(
        meta,
        option=orjson.OPT_INDENT_2 | orjson.OPT_SORT_KEYS | orjson.OPT_SERIALIZE_NUMPY,
    )
    _write(path, blob + b"\n")


def load_metadata(path) -> Dict[str, Any]:
    try:
        return orjson.loads(_read(path))
    except orjson.JSONDecodeError as e:
        raise MalformedHeaderError(f"{path} is not valid JSON: {e}") from e

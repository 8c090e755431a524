import unittest

import numpy as np
import orjson

from stemfill.core import (
    SamplingMask,
    SpectrumImage,
    load_cube,
    load_mask,
    load_metadata,
    store_cube,
    store_mask,
    store_metadata,
)
from stemfill.errors import (
    DimensionOverflowError,
    MalformedHeaderError,
    StorageError,
    TrailingPayloadError,
    TruncatedPayloadError,
)
from tests.helpers import make_temp_dir, temp_path


def _header(**fields):
    header = {
        "magic": "SSI1",
        "height": 2,
        "width": 2,
        "bands": 2,
        "dtype": "f32le",
        "order": "band-major",
    }
    header.update(fields)
    return orjson.dumps(header) + b"\n"


class TestCubeFiles(unittest.TestCase):
    def setUp(self):
        self.dir = make_temp_dir(self)

    def _write(self, name, blob):
        path = temp_path(self.dir, name)
        with open(path, "wb") as f:
            f.write(blob)
        return path

    def test_random_cubes_and_masks_roundtrip(self):
        rng = np.random.default_rng(5)
        for trial in range(100):
            h, w, b = (int(n) for n in rng.integers(1, 9, size=3))
            values = rng.standard_normal((b, h * w)).astype(np.float32).astype(np.float64)
            count = int(rng.integers(1, h * w + 1))
            mask = SamplingMask.from_indices(h, w, rng.choice(h * w, size=count, replace=False))
            cube_path = temp_path(self.dir, f"{trial}.ssi")
            mask_path = temp_path(self.dir, f"{trial}.ssm")
            store_cube(SpectrumImage(h, w, values), cube_path)
            store_mask(mask, mask_path)
            with self.subTest(trial=trial, shape=(h, w, b)):
                np.testing.assert_array_equal(load_cube(cube_path).data, values)
                np.testing.assert_array_equal(load_mask(mask_path).indices, mask.indices)

    def test_roundtrip_is_bit_exact(self):
        rng = np.random.default_rng(1)
        values = rng.standard_normal((5, 12)).astype(np.float32).astype(np.float64)
        x = SpectrumImage(3, 4, values)
        path = temp_path(self.dir, "cube.ssi")
        store_cube(x, path)
        loaded = load_cube(path)
        self.assertEqual(loaded.shape, (3, 4, 5))
        np.testing.assert_array_equal(loaded.data, values)

        again = temp_path(self.dir, "again.ssi")
        store_cube(loaded, again)
        with open(path, "rb") as a, open(again, "rb") as b:
            self.assertEqual(a.read(), b.read())

    def test_energy_axis_survives(self):
        x = SpectrumImage(1, 2, np.ones((3, 2)), energy_axis=[400.0, 500.0, 600.0])
        path = temp_path(self.dir, "axis.ssi")
        store_cube(x, path)
        np.testing.assert_array_equal(load_cube(path).energy_axis, [400.0, 500.0, 600.0])

    def test_header_is_one_json_line(self):
        path = temp_path(self.dir, "cube.ssi")
        store_cube(SpectrumImage(2, 2, np.zeros((2, 4))), path)
        with open(path, "rb") as f:
            header = orjson.loads(f.readline())
        self.assertEqual(header["magic"], "SSI1")
        self.assertEqual(header["dtype"], "f32le")
        self.assertEqual(header["order"], "band-major")

    def test_truncated_payload(self):
        path = self._write("short.ssi", _header() + np.zeros(7, "<f4").tobytes())
        with self.assertRaises(TruncatedPayloadError) as ctx:
            load_cube(path)
        self.assertEqual(ctx.exception.expected, 32)
        self.assertEqual(ctx.exception.got, 28)

    def test_trailing_payload(self):
        path = self._write("long.ssi", _header() + np.zeros(9, "<f4").tobytes())
        with self.assertRaises(TrailingPayloadError):
            load_cube(path)

    def test_malformed_headers(self):
        payload = np.zeros(8, "<f4").tobytes()
        cases = {
            "json.ssi": b"{not json\n" + payload,
            "magic.ssi": _header(magic="XXXX") + payload,
            "dtype.ssi": _header(dtype="f64le") + payload,
            "order.ssi": _header(order="pixel-major") + payload,
            "dims.ssi": _header(height=0) + payload,
            "bool.ssi": _header(width=True) + payload,
            "newline.ssi": b'{"magic":"SSI1"}',
            "axis_text.ssi": _header(energy_axis=["400", "500"]) + payload,
            "axis_type.ssi": _header(energy_axis="400-500") + payload,
            "axis_length.ssi": _header(energy_axis=[400.0]) + payload,
            "axis_order.ssi": _header(energy_axis=[500.0, 400.0]) + payload,
        }
        for name, blob in cases.items():
            with self.subTest(name=name):
                with self.assertRaises(MalformedHeaderError):
                    load_cube(self._write(name, blob))

    def test_dimension_overflow(self):
        path = self._write("huge.ssi", _header(height=1 << 20, width=1 << 20, bands=64))
        with self.assertRaises(DimensionOverflowError):
            load_cube(path)

    def test_missing_file(self):
        with self.assertRaises(StorageError):
            load_cube(temp_path(self.dir, "missing.ssi"))

    def test_errors_are_distinct(self):
        self.assertFalse(issubclass(TruncatedPayloadError, MalformedHeaderError))
        self.assertFalse(issubclass(DimensionOverflowError, TruncatedPayloadError))


class TestMaskFiles(unittest.TestCase):
    def setUp(self):
        self.dir = make_temp_dir(self)

    def test_roundtrip_preserves_ordering(self):
        mask = SamplingMask.from_indices(4, 5, [19, 0, 7, 12])
        path = temp_path(self.dir, "mask.ssm")
        store_mask(mask, path)
        loaded = load_mask(path)
        self.assertEqual(loaded.sampled_count, 4)
        np.testing.assert_array_equal(loaded.indices, [0, 7, 12, 19])

    def test_cube_is_not_a_mask(self):
        path = temp_path(self.dir, "cube.ssi")
        store_cube(SpectrumImage(2, 2, np.ones((1, 4))), path)
        with self.assertRaises(MalformedHeaderError):
            load_mask(path)

    def test_mask_values_must_be_binary(self):
        path = temp_path(self.dir, "bad.ssm")
        header = _header(bands=1, dtype="u8", order="row-major")
        with open(path, "wb") as f:
            f.write(header + bytes([0, 1, 2, 1]))
        with self.assertRaises(MalformedHeaderError):
            load_mask(path)


class TestMetadata(unittest.TestCase):
    def test_roundtrip_with_numpy_values(self):
        path = temp_path(make_temp_dir(self), "meta.json")
        store_metadata({"sigma": 0.5, "axis": np.array([1.0, 2.0]), "seed": 3}, path)
        self.assertEqual(load_metadata(path), {"axis": [1.0, 2.0], "seed": 3, "sigma": 0.5})

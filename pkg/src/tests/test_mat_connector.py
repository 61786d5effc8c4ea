"""
Tests for the MAT-file connector.
"""
import os
import tempfile
import unittest

import numpy as np
from scipy.io import savemat

from spectrasphere.connectors.mat_connector import MatArray, MatConnector, parse_mat
from spectrasphere.exceptions import (
    BadMagic, DataError, MatParseError, TruncatedFile, UnsupportedElementKind
)

import mat_fixtures as mf


class TestParseMat(unittest.TestCase):
    """Test cases for parse_mat on hand-built buffers."""

    def setUp(self):
        """Set up test fixtures."""
        self.cube = np.arange(24, dtype=np.float64).reshape(2, 3, 4) / 7.0
        self.gt = np.array([[0, 1, 2], [2, 1, 0]], dtype=np.uint8)

    def test_little_endian_arrays(self):
        """Arrays come back with their names, kinds, dims and values."""
        data = mf.mat_file(mf.matrix("cube", self.cube), mf.matrix("gt", self.gt))
        arrays = parse_mat(data)

        self.assertEqual(set(arrays), {"cube", "gt"})
        self.assertEqual(arrays["cube"].element_kind, "float64")
        self.assertEqual(arrays["cube"].dims, (2, 3, 4))
        np.testing.assert_array_equal(arrays["cube"].to_numpy(), self.cube)
        self.assertEqual(arrays["gt"].element_kind, "uint8")
        np.testing.assert_array_equal(arrays["gt"].to_numpy(), self.gt)

    def test_big_endian_arrays(self):
        """Big-endian files decode to the same values."""
        data = mf.mat_file(mf.matrix("cube", self.cube, endian='>'), mf.matrix("gt", self.gt, endian='>'),
                           endian='>')
        arrays = parse_mat(data)
        np.testing.assert_array_equal(arrays["cube"].to_numpy(), self.cube)
        np.testing.assert_array_equal(arrays["gt"].to_numpy(), self.gt)

    def test_long_names_and_other_kinds(self):
        """Names longer than four bytes and the other supported kinds parse."""
        values = np.array([[1, 2], [3, 4]], dtype=np.uint16)
        data = mf.mat_file(
            mf.matrix("indian_pines_gt", values),
            mf.matrix("single", np.ones((2, 2), dtype=np.float32)),
            mf.matrix("ints", np.array([[-5, 7]], dtype=np.int32)),
        )
        arrays = parse_mat(data)
        self.assertEqual(arrays["indian_pines_gt"].element_kind, "uint16")
        np.testing.assert_array_equal(arrays["indian_pines_gt"].to_numpy(), values)
        self.assertEqual(arrays["single"].element_kind, "float32")
        np.testing.assert_array_equal(arrays["ints"].to_numpy(), [[-5, 7]])

    def test_compressed_element(self):
        """Arrays inside a compressed element are inflated and read."""
        inner = mf.matrix("cube", self.cube) + mf.matrix("gt", self.gt)
        arrays = parse_mat(mf.mat_file(mf.compressed(inner)))
        np.testing.assert_array_equal(arrays["cube"].to_numpy(), self.cube)
        np.testing.assert_array_equal(arrays["gt"].to_numpy(), self.gt)

    def test_doubles_stored_as_small_integers(self):
        """A double array whose data is stored as miUINT8 is widened to float64."""
        values = np.array([[1, 2, 3]], dtype=np.uint8)
        data = mf.mat_file(mf.matrix("x", values, mx_class=mf.MX_DOUBLE, mi_type=mf.MI_UINT8))
        arrays = parse_mat(data)
        self.assertEqual(arrays["x"].element_kind, "float64")
        self.assertEqual(arrays["x"].values.dtype, np.float64)
        np.testing.assert_array_equal(arrays["x"].to_numpy(), [[1.0, 2.0, 3.0]])

    def test_values_are_read_only(self):
        """Parsed values cannot be modified in place."""
        arrays = parse_mat(mf.mat_file(mf.matrix("gt", self.gt)))
        with self.assertRaises(ValueError):
            arrays["gt"].values[0] = 9

    def test_char_array_is_skipped(self):
        """Non-numeric arrays are skipped and reported."""
        skipped = []
        data = mf.mat_file(mf.char_matrix("note", "hello"), mf.matrix("gt", self.gt))
        arrays = parse_mat(data, skipped=skipped)
        self.assertEqual(set(arrays), {"gt"})
        self.assertEqual(len(skipped), 1)
        self.assertIn("note", skipped[0])

    def test_complex_array_is_skipped(self):
        """Complex arrays are skipped, not half-read."""
        skipped = []
        data = mf.mat_file(mf.matrix("z", np.ones((2, 2)), complex_flag=True))
        self.assertEqual(parse_mat(data, skipped=skipped), {})
        self.assertEqual(len(skipped), 1)

    def test_unsupported_numeric_kind(self):
        """An int16 matrix raises UnsupportedElementKind."""
        data = mf.mat_file(mf.matrix("s", np.array([[1, 2]], dtype=np.int16)))
        with self.assertRaises(UnsupportedElementKind):
            parse_mat(data)

    def test_header_only(self):
        """A header with no elements parses to an empty mapping."""
        self.assertEqual(parse_mat(mf.header()), {})

    def test_short_header(self):
        """Fewer than 128 bytes is a truncated file."""
        with self.assertRaises(TruncatedFile):
            parse_mat(mf.header()[:100])

    def test_bad_magic(self):
        """A header that does not start with MATL is rejected."""
        data = bytearray(mf.header())
        data[:4] = b'HDF5'
        with self.assertRaises(BadMagic):
            parse_mat(bytes(data))

    def test_bad_version(self):
        """Version words other than 0x0100 are rejected."""
        with self.assertRaises(BadMagic):
            parse_mat(mf.header(version=0x0200))

    def test_bad_endian_indicator(self):
        """An endian indicator other than IM or MI is rejected."""
        data = bytearray(mf.header())
        data[126:128] = b'XX'
        with self.assertRaises(BadMagic):
            parse_mat(bytes(data))

    def test_truncated_payload(self):
        """Cutting the file inside an element raises TruncatedFile."""
        data = mf.mat_file(mf.matrix("cube", self.cube))
        with self.assertRaises(TruncatedFile):
            parse_mat(data[:-20])

    def test_truncated_tag(self):
        """Leftover bytes shorter than a tag raise TruncatedFile."""
        data = mf.mat_file(mf.matrix("gt", self.gt)) + b'\x0e\x00\x00'
        with self.assertRaises(TruncatedFile):
            parse_mat(data)

    def test_truncated_compressed_stream(self):
        """A compressed element whose zlib stream is cut short is truncated."""
        element = mf.compressed(mf.matrix("cube", self.cube))
        stream = element[8:-10]
        cut = element[:4] + len(stream).to_bytes(4, 'little') + stream
        with self.assertRaises(TruncatedFile):
            parse_mat(mf.mat_file(cut))

    def test_parse_errors_share_a_base(self):
        """Every parse failure is a MatParseError."""
        for error in (TruncatedFile, BadMagic, UnsupportedElementKind):
            self.assertTrue(issubclass(error, MatParseError))


class TestMatArray(unittest.TestCase):
    """Test cases for MatArray invariants."""

    def test_dims_must_match_values(self):
        """Declared dims must account for every value."""
        with self.assertRaises(MatParseError):
            MatArray(name="x", element_kind="float64", dims=(2, 2), values=np.zeros(3))

    def test_rank_must_be_two_or_three(self):
        """Arrays are 2-D or 3-D."""
        with self.assertRaises(MatParseError):
            MatArray(name="x", element_kind="float64", dims=(2, 2, 2, 2), values=np.zeros(16))

    def test_column_major_reshape(self):
        """to_numpy reads values in column-major order."""
        array = MatArray(name="x", element_kind="float64", dims=(2, 3), values=np.arange(6.0))
        np.testing.assert_array_equal(array.to_numpy(), [[0, 2, 4], [1, 3, 5]])


class TestMatConnector(unittest.TestCase):
    """Test cases for MatConnector against files written by scipy."""

    def setUp(self):
        """Set up test fixtures."""
        self.tmpdir = tempfile.TemporaryDirectory()
        self.addCleanup(self.tmpdir.cleanup)
        self.connector = MatConnector()
        rng = np.random.default_rng(3)
        self.cube = rng.random((5, 4, 6))
        self.gt = rng.integers(0, 4, size=(5, 4)).astype(np.uint8)
        self.path = os.path.join(self.tmpdir.name, "scene.mat")
        savemat(self.path, {"scene_cube": self.cube, "scene_gt": self.gt, "label": "demo"})

    def test_reads_scipy_file(self):
        """Files from an independent writer round-trip."""
        np.testing.assert_array_equal(self.connector.read_array(self.path, "scene_cube").to_numpy(), self.cube)
        np.testing.assert_array_equal(self.connector.read_array(self.path, "scene_gt").to_numpy(), self.gt)

    def test_reads_compressed_scipy_file(self):
        """Compressed files from scipy round-trip."""
        path = os.path.join(self.tmpdir.name, "compressed.mat")
        savemat(path, {"scene_cube": self.cube}, do_compression=True)
        np.testing.assert_array_equal(self.connector.read_array(path, "scene_cube").to_numpy(), self.cube)

    def test_list_variables(self):
        """Only numeric variables are listed, sorted by name."""
        names = [name for name, _, _ in self.connector.list_variables(self.path)]
        self.assertEqual(names, ["scene_cube", "scene_gt"])

    def test_missing_variable(self):
        """Asking for an absent variable names the available ones."""
        with self.assertRaises(DataError) as ctx:
            self.connector.read_array(self.path, "nope")
        self.assertIn("scene_cube", str(ctx.exception))

    def test_missing_file(self):
        """A missing file raises FileNotFoundError naming the path."""
        path = os.path.join(self.tmpdir.name, "absent.mat")
        with self.assertRaises(FileNotFoundError) as ctx:
            self.connector.read_arrays(path)
        self.assertIn("absent.mat", str(ctx.exception))

    def test_file_metadata(self):
        """Header fields are reported without parsing elements."""
        metadata = self.connector.get_file_metadata(self.path)
        self.assertEqual(metadata["version"], 0x0100)
        self.assertIn(metadata["byte_order"], ("little", "big"))
        self.assertEqual(metadata["size_bytes"], os.path.getsize(self.path))
        self.assertTrue(metadata["description"].startswith("MATLAB 5.0 MAT-file"))

    def test_cache(self):
        """A file is parsed once per connector."""
        first = self.connector.read_arrays(self.path)
        self.assertIs(self.connector.read_arrays(self.path), first)


if __name__ == '__main__':
    unittest.main()

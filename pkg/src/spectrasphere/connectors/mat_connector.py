"""
MAT-file connector for spectrasphere.
Reads the numeric-array subset of the MAT-v5 container in which the
hyperspectral benchmark scenes are distributed.
"""
import logging
import os
import struct
import zlib
from dataclasses import dataclass
from typing import Dict, List, Optional, Tuple

import numpy as np

from spectrasphere.exceptions import (
    BadMagic, DataError, MatParseError, TruncatedFile, UnsupportedElementKind
)

logger = logging.getLogger(__name__)

HEADER_SIZE = 128
TAG_SIZE = 8
SUPPORTED_VERSION = 0x0100

# data element types
MI_MATRIX = 14
MI_COMPRESSED = 15

ELEMENT_DTYPES = {
    1: 'i1',    # miINT8
    2: 'u1',    # miUINT8
    3: 'i2',    # miINT16
    4: 'u2',    # miUINT16
    5: 'i4',    # miINT32
    6: 'u4',    # miUINT32
    7: 'f4',    # miSINGLE
    9: 'f8',    # miDOUBLE
    12: 'i8',   # miINT64
    13: 'u8',   # miUINT64
}

# array classes we load, keyed by mxCLASS id
NUMERIC_CLASSES = {
    6: 'float64',
    7: 'float32',
    9: 'uint8',
    11: 'uint16',
    12: 'int32',
}

# numeric classes that exist in the format but are outside the supported set
OTHER_NUMERIC_CLASSES = {8: 'int8', 10: 'int16', 13: 'uint32', 14: 'int64', 15: 'uint64'}

# non-numeric classes are skipped with a warning
SKIPPED_CLASSES = {
    1: 'cell', 2: 'struct', 3: 'object', 4: 'char', 5: 'sparse',
    16: 'function', 17: 'opaque', 18: 'object'
}

COMPLEX_FLAG = 0x0800


@dataclass(frozen=True)
class MatArray:
    """
    A numeric matrix read from a MAT-file.

    Values are kept flat in the container's column-major order; use
    ``to_numpy`` for a shaped view.
    """
    name: str
    element_kind: str
    dims: Tuple[int, ...]
    values: np.ndarray

    def __post_init__(self):
        if len(self.dims) not in (2, 3):
            raise MatParseError(f"Array '{self.name}' has {len(self.dims)} dimensions; expected 2 or 3")
        if any(extent < 1 for extent in self.dims):
            raise MatParseError(f"Array '{self.name}' has an empty extent: {self.dims}")
        if int(np.prod(self.dims)) != self.values.size:
            raise MatParseError(
                f"Array '{self.name}' declares dims {self.dims} but holds {self.values.size} values"
            )

    def to_numpy(self):
        """Return the values shaped by ``dims`` (column-major reading)."""
        return self.values.reshape(self.dims, order='F')


def parse_mat(data, skipped: Optional[List[str]] = None) -> Dict[str, MatArray]:
    """
    Parse a MAT-v5 byte buffer.

    Args:
        data: The raw file contents
        skipped: Optional list that receives a message for every element that
            was skipped (cells, structs, char arrays, ...)

    Returns:
        dict: Top-level numeric arrays keyed by variable name

    Raises:
        TruncatedFile: If the buffer ends inside a declared element
        BadMagic: If the header check fails
        UnsupportedElementKind: If a numeric matrix uses an unsupported class
    """
    buf = memoryview(bytes(data))
    if len(buf) < HEADER_SIZE:
        raise TruncatedFile(f"MAT header needs {HEADER_SIZE} bytes, buffer has {len(buf)}")
    if bytes(buf[:4]) != b'MATL':
        raise BadMagic("Not a MAT-file: header does not start with 'MATL'")

    endian = _endianness(bytes(buf[126:128]))
    version = struct.unpack_from(endian + 'H', buf, 124)[0]
    if version != SUPPORTED_VERSION:
        raise BadMagic(
            f"Unsupported MAT version 0x{version:04x}; only MAT-v5 (0x0100) is readable, not v7.3/HDF5"
        )

    arrays = {}
    for etype, payload in _iter_elements(buf, HEADER_SIZE, endian):
        _read_element(etype, payload, endian, arrays, skipped)

    logger.debug(f"Parsed {len(arrays)} numeric arrays from MAT buffer")
    return arrays


def _endianness(indicator):
    # the writer stores 'MI' as a 16-bit value; it reads back as 'IM' on little-endian files
    if indicator == b'IM':
        return '<'
    if indicator == b'MI':
        return '>'
    raise BadMagic(f"Invalid endian indicator {indicator!r} at offset 126")


def _padded(nbytes):
    return (nbytes + 7) // 8 * 8


def _iter_elements(buf, offset, endian):
    """Yield (type, payload) for each data element in ``buf`` from ``offset``."""
    end = len(buf)
    while offset < end:
        if end - offset < TAG_SIZE:
            raise TruncatedFile(f"Element tag at byte {offset} is cut short")
        first, second = struct.unpack_from(endian + 'II', buf, offset)
        if first >> 16:
            # small data element: size and type share the first word
            etype = first & 0xFFFF
            nbytes = first >> 16
            if nbytes > 4:
                raise MatParseError(f"Small data element at byte {offset} declares {nbytes} bytes")
            payload = buf[offset + 4:offset + 4 + nbytes]
            offset += TAG_SIZE
        else:
            etype, nbytes = first, second
            start = offset + TAG_SIZE
            stop = start + nbytes
            if stop > end:
                raise TruncatedFile(
                    f"Element at byte {offset} declares {nbytes} bytes but only {end - start} remain"
                )
            payload = buf[start:stop]
            # compressed elements are not padded
            offset = stop if etype == MI_COMPRESSED else start + _padded(nbytes)
        yield etype, payload


def _read_element(etype, payload, endian, arrays, skipped):
    if etype == MI_COMPRESSED:
        inflater = zlib.decompressobj()
        try:
            inflated = inflater.decompress(payload)
        except zlib.error as e:
            raise MatParseError(f"Compressed element could not be inflated: {e}")
        if not inflater.eof:
            raise TruncatedFile("Compressed element ends before its zlib stream is complete")
        for inner_type, inner_payload in _iter_elements(memoryview(inflated), 0, endian):
            _read_element(inner_type, inner_payload, endian, arrays, skipped)
        return

    if etype != MI_MATRIX:
        _skip(skipped, f"top-level element of type {etype}")
        return

    array = _read_matrix(payload, endian, skipped)
    if array is not None:
        arrays[array.name] = array


def _next_subelement(elements, what):
    try:
        return next(elements)
    except StopIteration:
        raise MatParseError(f"Matrix element is missing its {what} subelement")


def _decode(etype, payload, endian):
    if etype not in ELEMENT_DTYPES:
        raise UnsupportedElementKind(f"Data subelement of type {etype} is not a numeric element type")
    dtype = np.dtype(ELEMENT_DTYPES[etype]).newbyteorder(endian)
    if len(payload) % dtype.itemsize:
        raise MatParseError(
            f"Data subelement holds {len(payload)} bytes, not a multiple of {dtype.itemsize}"
        )
    return np.frombuffer(payload, dtype=dtype)


def _read_matrix(payload, endian, skipped):
    elements = _iter_elements(payload, 0, endian)

    _, flags = _next_subelement(elements, "array flags")
    if len(flags) < 4:
        raise MatParseError("Array flags subelement is too short")
    flags_word = struct.unpack_from(endian + 'I', flags, 0)[0]
    mclass = flags_word & 0xFF

    dims_type, dims_payload = _next_subelement(elements, "dimensions")
    dims = tuple(int(extent) for extent in _decode(dims_type, dims_payload, endian))

    _, name_payload = _next_subelement(elements, "name")
    name = bytes(name_payload).rstrip(b'\x00').decode('latin1')

    if mclass in SKIPPED_CLASSES:
        _skip(skipped, f"'{name}' ({SKIPPED_CLASSES[mclass]} array)")
        return None
    if mclass in OTHER_NUMERIC_CLASSES:
        raise UnsupportedElementKind(
            f"Array '{name}' is of class {OTHER_NUMERIC_CLASSES[mclass]}; "
            f"supported kinds are {sorted(NUMERIC_CLASSES.values())}"
        )
    if mclass not in NUMERIC_CLASSES:
        _skip(skipped, f"'{name}' (unknown array class {mclass})")
        return None
    if flags_word & COMPLEX_FLAG:
        _skip(skipped, f"'{name}' (complex array)")
        return None
    if len(dims) not in (2, 3) or any(extent < 1 for extent in dims):
        _skip(skipped, f"'{name}' (dims {dims})")
        return None

    real_type, real_payload = _next_subelement(elements, "real part")
    element_kind = NUMERIC_CLASSES[mclass]
    values = _decode(real_type, real_payload, endian).astype(element_kind)
    values.setflags(write=False)

    return MatArray(name=name, element_kind=element_kind, dims=dims, values=values)


def _skip(skipped, what):
    message = f"Skipped MAT element {what}"
    logger.warning(message)
    if skipped is not None:
        skipped.append(message)


class MatConnector:
    """
    Reads scenes stored as MAT-v5 files on the local filesystem.
    """

    def __init__(self):
        """Initialise the connector with an empty per-path cache."""
        self._cache = {}
        logger.debug("Initialised MatConnector")

    def read_arrays(self, path):
        """
        Read every numeric array in a MAT-file.

        Args:
            path: Path to the MAT-file

        Returns:
            dict: Arrays keyed by variable name

        Raises:
            FileNotFoundError: If the file does not exist
            MatParseError: If the file cannot be parsed
        """
        path = os.path.abspath(path)
        if path in self._cache:
            return self._cache[path]
        if not os.path.exists(path):
            logger.error(f"MAT-file not found: {path}")
            raise FileNotFoundError(f"MAT-file not found: {path}")

        logger.info(f"Reading MAT-file {path}")
        with open(path, 'rb') as f:
            data = f.read()

        try:
            arrays = parse_mat(data)
        except MatParseError as e:
            logger.error(f"Error parsing MAT-file {path}: {e}")
            raise

        self._cache[path] = arrays
        return arrays

    def read_array(self, path, name):
        """
        Read a single named array from a MAT-file.

        Args:
            path: Path to the MAT-file
            name: Variable name inside the file

        Returns:
            MatArray

        Raises:
            DataError: If the variable is not present
        """
        arrays = self.read_arrays(path)
        if name not in arrays:
            available = ", ".join(sorted(arrays)) or "none"
            raise DataError(f"Variable '{name}' not found in {path} (available: {available})")
        return arrays[name]

    def list_variables(self, path):
        """
        List the numeric variables of a MAT-file.

        Args:
            path: Path to the MAT-file

        Returns:
            List of (name, element kind, dims) tuples sorted by name
        """
        arrays = self.read_arrays(path)
        return [(a.name, a.element_kind, a.dims) for _, a in sorted(arrays.items())]

    def get_file_metadata(self, path):
        """
        Read the header fields of a MAT-file without parsing its elements.

        Args:
            path: Path to the MAT-file

        Returns:
            Dictionary of file metadata
        """
        if not os.path.exists(path):
            raise FileNotFoundError(f"MAT-file not found: {path}")

        with open(path, 'rb') as f:
            header = f.read(HEADER_SIZE)
        if len(header) < HEADER_SIZE:
            raise TruncatedFile(f"MAT header needs {HEADER_SIZE} bytes, file has {len(header)}")

        endian = _endianness(header[126:128])
        return {
            'size_bytes': os.path.getsize(path),
            'description': header[:116].rstrip(b' \x00').decode('latin1'),
            'version': struct.unpack_from(endian + 'H', header, 124)[0],
            'byte_order': 'little' if endian == '<' else 'big',
        }

"""
Hand-built MAT-v5 buffers for the connector tests.
"""
import struct
import zlib

import numpy as np

MI_INT8 = 1
MI_UINT8 = 2
MI_INT16 = 3
MI_UINT16 = 4
MI_INT32 = 5
MI_UINT32 = 6
MI_SINGLE = 7
MI_DOUBLE = 9
MI_MATRIX = 14
MI_COMPRESSED = 15

MX_CHAR = 4
MX_DOUBLE = 6
MX_SINGLE = 7
MX_INT16 = 10
MX_UINT8 = 9
MX_UINT16 = 11
MX_INT32 = 12

MI_FOR_DTYPE = {
    'float64': MI_DOUBLE,
    'float32': MI_SINGLE,
    'uint8': MI_UINT8,
    'uint16': MI_UINT16,
    'int16': MI_INT16,
    'int32': MI_INT32,
}


def header(endian='<', version=0x0100, text=b'MATLAB 5.0 MAT-file, written by the test suite'):
    body = text.ljust(116, b' ')[:116] + b'\x00' * 8
    indicator = b'IM' if endian == '<' else b'MI'
    return body + struct.pack(endian + 'H', version) + indicator


def element(etype, payload, endian='<'):
    """A data element with a full 8-byte tag, padded to 8 bytes."""
    padding = (-len(payload)) % 8
    return struct.pack(endian + 'II', etype, len(payload)) + payload + b'\x00' * padding


def small_element(etype, payload, endian='<'):
    """A small data element (payload of at most 4 bytes packed into the tag)."""
    assert len(payload) <= 4
    return struct.pack(endian + 'I', (len(payload) << 16) | etype) + payload.ljust(4, b'\x00')


def matrix(name, values, mx_class=None, mi_type=None, endian='<', complex_flag=False, small_name=True):
    """
    A miMATRIX element holding ``values`` in column-major order.
    """
    values = np.asarray(values)
    dtype = values.dtype.name
    mi_type = mi_type or MI_FOR_DTYPE[dtype]
    if mx_class is None:
        mx_class = {'float64': MX_DOUBLE, 'float32': MX_SINGLE, 'uint8': MX_UINT8,
                    'uint16': MX_UINT16, 'int16': MX_INT16, 'int32': MX_INT32}[dtype]

    flags = mx_class | (0x0800 if complex_flag else 0)
    parts = [element(MI_UINT32, struct.pack(endian + 'II', flags, 0), endian)]
    parts.append(element(MI_INT32, np.asarray(values.shape, dtype=endian + 'i4').tobytes(), endian))
    encoded_name = name.encode('latin1')
    if small_name and len(encoded_name) <= 4:
        parts.append(small_element(MI_INT8, encoded_name, endian))
    else:
        parts.append(element(MI_INT8, encoded_name, endian))
    data = values.ravel(order='F').astype(values.dtype.newbyteorder(endian)).tobytes()
    parts.append(element(mi_type, data, endian))
    if complex_flag:
        parts.append(element(mi_type, data, endian))
    return element(MI_MATRIX, b''.join(parts), endian)


def char_matrix(name, text, endian='<'):
    codes = np.frombuffer(text.encode('latin1'), dtype=np.uint8).reshape(1, -1)
    return matrix(name, codes.astype(np.uint16), mx_class=MX_CHAR, mi_type=MI_UINT16, endian=endian)


def compressed(inner, level=6):
    """Wrap elements in a miCOMPRESSED element (zlib stream, no padding)."""
    stream = zlib.compress(inner, level)
    return struct.pack('<II', MI_COMPRESSED, len(stream)) + stream


def mat_file(*elements, endian='<', version=0x0100):
    return header(endian, version) + b''.join(elements)

"""Versioned binary container of named float32 tensors.

Layout: magic "TORD" | u32 version | u32 tensor count | entries | u32 CRC32.
Each entry: u16 name length | name utf-8 | u8 rank | u32 dims | float32
little-endian payload. The CRC covers every byte between the header and the
trailer; it is verified before any tensor is materialized, so a truncated
or corrupted file never yields a partial model.
"""

from __future__ import annotations

import struct
import zlib
from pathlib import Path

import numpy as np

from ..errors import ChecksumMismatch, ParseError, SchemaViolation, VersionUnsupported

MAGIC = b"TORD"
VERSION = 1
_HEADER = struct.Struct("<4sII")


def save_tensors(path, tensors: dict[str, np.ndarray]) -> None:
    body = bytearray()
    for name, array in tensors.items():
        encoded = name.encode("utf-8")
        array = np.ascontiguousarray(array, dtype="<f4")
        body += struct.pack("<H", len(encoded))
        body += encoded
        body += struct.pack("<B", array.ndim)
        body += struct.pack(f"<{array.ndim}I", *array.shape)
        body += array.tobytes()
    blob = _HEADER.pack(MAGIC, VERSION, len(tensors)) + bytes(body)
    blob += struct.pack("<I", zlib.crc32(bytes(body)))
    Path(path).write_bytes(blob)


def load_tensors(path, expected_shapes: dict[str, tuple] | None = None
                 ) -> dict[str, np.ndarray]:
    """Read a container; validates magic, version, CRC, and optionally the
    tensor shapes against `expected_shapes`."""
    blob = Path(path).read_bytes()
    if len(blob) < _HEADER.size + 4:
        raise ChecksumMismatch("checkpoint truncated before header")
    magic, version, count = _HEADER.unpack_from(blob, 0)
    if magic != MAGIC:
        raise ParseError(f"bad checkpoint magic {magic!r}")
    if version != VERSION:
        raise VersionUnsupported(f"checkpoint version {version}, expected {VERSION}")
    body = blob[_HEADER.size:-4]
    (stored_crc,) = struct.unpack("<I", blob[-4:])
    if zlib.crc32(body) != stored_crc:
        raise ChecksumMismatch("checkpoint payload CRC mismatch")

    tensors: dict[str, np.ndarray] = {}
    offset = 0
    try:
        for _ in range(count):
            (name_len,) = struct.unpack_from("<H", body, offset)
            offset += 2
            name = body[offset:offset + name_len].decode("utf-8")
            offset += name_len
            (rank,) = struct.unpack_from("<B", body, offset)
            offset += 1
            dims = struct.unpack_from(f"<{rank}I", body, offset)
            offset += 4 * rank
            size = int(np.prod(dims, dtype=np.int64)) if rank else 1
            payload = body[offset:offset + 4 * size]
            if len(payload) != 4 * size:
                raise ChecksumMismatch("checkpoint body shorter than declared")
            offset += 4 * size
            tensors[name] = np.frombuffer(payload, dtype="<f4").reshape(dims).copy()
    except struct.error as exc:
        raise ChecksumMismatch(f"checkpoint body malformed: {exc}") from exc
    if offset != len(body):
        raise ChecksumMismatch("checkpoint has trailing bytes")

    if expected_shapes is not None:
        for name, shape in expected_shapes.items():
            if name not in tensors:
                raise SchemaViolation(f"checkpoint missing tensor {name!r}", field=name)
            if tuple(tensors[name].shape) != tuple(shape):
                raise SchemaViolation(
                    f"tensor {name!r} has shape {tensors[name].shape}, "
                    f"expected {tuple(shape)}", field=name)
        extra = set(tensors) - set(expected_shapes)
        if extra:
            raise SchemaViolation(f"unexpected tensors {sorted(extra)} in checkpoint")
    return tensors

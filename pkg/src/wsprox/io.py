"""Vector file formats for the CLI.

Text: one decimal per line. Binary: an 8-byte magic, an 8-byte little-endian
unsigned length, then length float64 little-endian values. A binary file may
hold several records back to back; text files hold exactly one vector.
"""

from __future__ import annotations

import struct
from pathlib import Path

import numpy as np

MAGIC = b"WSPROXF8"
_HEADER = struct.Struct("<8sQ")


def write_text_vector(path, values) -> None:
    values = np.asarray(values, dtype=np.float64)
    with open(path, "w") as fh:
        for val in values:
            fh.write(repr(float(val)) + "\n")


def write_binary_vectors(path, vectors) -> None:
    with open(path, "wb") as fh:
        for vec in vectors:
            vec = np.ascontiguousarray(vec, dtype=np.float64)
            fh.write(_HEADER.pack(MAGIC, vec.shape[0]))
            fh.write(vec.astype("<f8").tobytes())


def read_vectors(path) -> list[np.ndarray]:
    """Read one text vector or all binary records from a file."""
    raw = Path(path).read_bytes()
    if raw[:8] == MAGIC:
        out = []
        off = 0
        while off < len(raw):
            if len(raw) - off < _HEADER.size:
                raise ValueError(f"{path}: truncated binary header")
            magic, count = _HEADER.unpack_from(raw, off)
            if magic != MAGIC:
                raise ValueError(f"{path}: bad record magic at offset {off}")
            off += _HEADER.size
            nbytes = 8 * count
            if len(raw) - off < nbytes:
                raise ValueError(f"{path}: truncated binary payload")
            out.append(np.frombuffer(raw, dtype="<f8", count=count, offset=off).astype(np.float64))
            off += nbytes
        if not out:
            raise ValueError(f"{path}: no records")
        return out
    try:
        text = raw.decode("utf-8")
    except UnicodeDecodeError as exc:
        raise ValueError(f"{path}: neither binary magic nor utf-8 text") from exc
    values = [float(line) for line in text.split() if line.strip()]
    if not values:
        raise ValueError(f"{path}: empty vector")
    return [np.asarray(values, dtype=np.float64)]


def read_vector(path) -> np.ndarray:
    vectors = read_vectors(path)
    if len(vectors) != 1:
        raise ValueError(f"{path}: expected a single vector, found {len(vectors)} records")
    return vectors[0]

"""RSLF: the toolkit's flat matrix container.

Layout: magic "RSLF", version u32 LE, rows u32 LE, cols u32 LE, then
rows*cols float32 LE values in row-major order.  One file per utterance
per feature kind; also used for neural parameter fixtures.
"""

from __future__ import annotations

import struct
from pathlib import Path

import numpy as np

from .errors import CorruptFile

MAGIC = b"RSLF"
VERSION = 1
_HEADER = struct.Struct("<4sIII")


def write_matrix(matrix: np.ndarray, path: str | Path) -> None:
    m = np.ascontiguousarray(matrix, dtype="<f4")
    if m.ndim != 2:
        raise ValueError(f"expected a 2-D matrix, got shape {m.shape}")
    with open(path, "wb") as f:
        f.write(_HEADER.pack(MAGIC, VERSION, m.shape[0], m.shape[1]))
        f.write(m.tobytes())


def read_matrix(path: str | Path) -> np.ndarray:
    data = Path(path).read_bytes()
    if len(data) < _HEADER.size:
        raise CorruptFile(f"{path}: shorter than the RSLF header")
    magic, version, rows, cols = _HEADER.unpack_from(data)
    if magic != MAGIC:
        raise CorruptFile(f"{path}: bad magic {magic!r}")
    if version != VERSION:
        raise CorruptFile(f"{path}: unsupported version {version}")
    expected = _HEADER.size + 4 * rows * cols
    if len(data) != expected:
        raise CorruptFile(f"{path}: payload is {len(data) - _HEADER.size} bytes, "
                          f"expected {4 * rows * cols}")
    values = np.frombuffer(data, dtype="<f4", offset=_HEADER.size)
    return values.reshape(rows, cols).astype(np.float64)

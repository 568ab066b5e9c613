"""Little-endian float32 matrix container used for feature files.

Layout: 4-byte magic, u16 version, u32 rows, u32 cols, then ``rows * cols``
float32 values in row-major order. A JSON sidecar (``<file>.json``) carries
free-form metadata.
"""
from __future__ import annotations

import json
import struct
from pathlib import Path

import numpy as np

from .errors import FormatError

VERSION = 1
_HEADER = struct.Struct("<4sHII")


def sidecar_path(path) -> Path:
    path = Path(path)
    return path.with_name(path.name + ".json")


def write_matrix(path, magic: bytes, matrix, meta: dict | None = None) -> None:
    matrix = np.asarray(matrix)
    if matrix.ndim != 2:
        raise FormatError(f"expected a 2-D matrix, got shape {matrix.shape}")
    rows, cols = matrix.shape
    payload = np.ascontiguousarray(matrix, dtype="<f4").tobytes()
    with open(path, "wb") as fh:
        fh.write(_HEADER.pack(magic, VERSION, rows, cols))
        fh.write(payload)
    if meta is not None:
        sidecar_path(path).write_text(json.dumps(meta, indent=2, sort_keys=True))


def read_matrix(path, magic: bytes, rows: int | None = None, cols: int | None = None):
    """Read a container, checking magic and (optionally) the declared shape.

    Returns ``(matrix, meta)``; ``meta`` is ``{}`` when no sidecar exists.
    """
    path = Path(path)
    try:
        blob = path.read_bytes()
    except OSError as exc:
        raise FormatError(f"cannot read {path}: {exc}") from exc
    if len(blob) < _HEADER.size:
        raise FormatError(f"{path}: truncated header")
    got_magic, version, n_rows, n_cols = _HEADER.unpack_from(blob)
    if got_magic != magic:
        raise FormatError(f"{path}: bad magic {got_magic!r}, expected {magic!r}")
    if version != VERSION:
        raise FormatError(f"{path}: unsupported version {version}")
    if rows is not None and n_rows != rows:
        raise FormatError(f"{path}: declares {n_rows} rows, expected {rows}")
    if cols is not None and n_cols != cols:
        raise FormatError(f"{path}: declares {n_cols} cols, expected {cols}")
    expected = _HEADER.size + 4 * n_rows * n_cols
    if len(blob) != expected:
        raise FormatError(f"{path}: payload is {len(blob)} bytes, expected {expected}")
    data = np.frombuffer(blob, dtype="<f4", offset=_HEADER.size).reshape(n_rows, n_cols)
    side = sidecar_path(path)
    meta = json.loads(side.read_text()) if side.exists() else {}
    return data.copy(), meta

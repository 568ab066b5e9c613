"""Checkpoint container.

``HAPT`` magic, u16 version, u32 header length, UTF-8 JSON header, then the
tensors as raw little-endian float64 blobs. The header's ``tensors`` table
maps each name to its shape and byte offset (relative to the blob start).
"""
from __future__ import annotations

import json
import struct

import numpy as np

from ..errors import FormatError

MAGIC = b"HAPT"
VERSION = 1
_PREFIX = struct.Struct("<4sHI")


def save_checkpoint(path, tensors: dict, header: dict | None = None) -> None:
    header = dict(header or {})
    table = {}
    offset = 0
    blobs = []
    for name in sorted(tensors):
        arr = np.ascontiguousarray(tensors[name], dtype="<f8")
        table[name] = {"shape": list(arr.shape), "offset": offset}
        blobs.append(arr.tobytes())
        offset += arr.nbytes
    header["tensors"] = table
    head = json.dumps(header, sort_keys=True).encode("utf-8")
    with open(path, "wb") as fh:
        fh.write(_PREFIX.pack(MAGIC, VERSION, len(head)))
        fh.write(head)
        for blob in blobs:
            fh.write(blob)


def load_checkpoint(path):
    """Return ``(tensors, header)``; tensors come back as float64 arrays."""
    with open(path, "rb") as fh:
        blob = fh.read()
    if len(blob) < _PREFIX.size:
        raise FormatError(f"{path}: truncated checkpoint")
    magic, version, head_len = _PREFIX.unpack_from(blob)
    if magic != MAGIC:
        raise FormatError(f"{path}: bad magic {magic!r}")
    if version != VERSION:
        raise FormatError(f"{path}: unsupported checkpoint version {version}")
    start = _PREFIX.size + head_len
    header = json.loads(blob[_PREFIX.size:start].decode("utf-8"))
    tensors = {}
    for name, entry in header["tensors"].items():
        shape = tuple(entry["shape"])
        count = int(np.prod(shape)) if shape else 1
        lo = start + entry["offset"]
        if lo + 8 * count > len(blob):
            raise FormatError(f"{path}: tensor {name} runs past end of file")
        tensors[name] = np.frombuffer(blob, dtype="<f8", count=count, offset=lo).reshape(shape).copy()
    return tensors, header

"""NTPE binary matrix container.

Layout: 24-byte header (magic "NTPE", version, kind, two reserved zero
bytes, rows and cols as little-endian u64) followed by the row-major
little-endian payload. Kind 0 is a u32 distance encoding, kind 1 an f32
embedding. A JSON sidecar at <file>.meta.json carries provenance; its
shape fields must agree with the header.
"""
from __future__ import annotations

import json
import struct
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

MAGIC = b"NTPE"
VERSION = 1
KIND_ENCODING = 0
KIND_EMBEDDING = 1

_HEADER = struct.Struct("<4sBB2sQQ")
_DTYPES = {KIND_ENCODING: np.dtype("<u4"), KIND_EMBEDDING: np.dtype("<f4")}

META_FIELDS = ("kind", "rows", "cols", "graph_hash", "anchors", "c", "cr",
               "strategy", "seed", "created")


class NtpeError(ValueError):
    """File-format violation; ``code`` identifies which contract broke."""

    def __init__(self, code: str, message: str):
        super().__init__(message)
        self.code = code


def sidecar_path(path) -> Path:
    return Path(str(path) + ".meta.json")


def kind_of(matrix: np.ndarray) -> int:
    if matrix.dtype == np.uint32:
        return KIND_ENCODING
    if matrix.dtype == np.float32:
        return KIND_EMBEDDING
    raise ValueError(
        f"unsupported matrix dtype {matrix.dtype}; use uint32 or float32")


def write_ntpe(path, matrix: np.ndarray, meta: dict | None = None) -> None:
    """Write matrix + sidecar; infers kind from dtype.

    A ``kind`` already present in ``meta`` must match the matrix dtype.
    Remaining provenance fields default to null so the sidecar schema is
    stable regardless of how much the caller knows.
    """
    matrix = np.atleast_2d(matrix)
    kind = kind_of(matrix)
    if meta and "kind" in meta and meta["kind"] != kind:
        raise ValueError(
            f"declared kind {meta['kind']} does not match matrix kind {kind}")
    rows, cols = matrix.shape
    header = _HEADER.pack(MAGIC, VERSION, kind, b"\x00\x00", rows, cols)
    payload = np.ascontiguousarray(matrix.astype(_DTYPES[kind],
                                                 copy=False)).tobytes()
    Path(path).write_bytes(header + payload)

    out = {k: None for k in META_FIELDS}
    out.update(meta or {})
    out.update(kind=kind, rows=rows, cols=cols)
    if out["created"] is None:
        out["created"] = datetime.now(timezone.utc).isoformat()
    sidecar_path(path).write_text(json.dumps(out, indent=2) + "\n")


def read_ntpe(path, require_sidecar: bool = True):
    """Read and validate; returns (matrix, meta).

    Header is checked before the payload is touched. With
    ``require_sidecar`` off a missing sidecar yields meta=None, but a
    present sidecar is still validated.
    """
    raw = Path(path).read_bytes()
    if len(raw) < _HEADER.size:
        raise NtpeError("truncated",
                        f"{path}: header needs {_HEADER.size} bytes, "
                        f"file has {len(raw)}")
    magic, version, kind, _, rows, cols = _HEADER.unpack_from(raw)
    if magic != MAGIC:
        raise NtpeError("bad-magic", f"{path}: magic {magic!r}, expected "
                                     f"{MAGIC!r}")
    if version != VERSION:
        raise NtpeError("bad-version",
                        f"{path}: version {version}, expected {VERSION}")
    if kind not in _DTYPES:
        raise NtpeError("bad-kind", f"{path}: unknown kind {kind}")
    expected = rows * cols * _DTYPES[kind].itemsize
    actual = len(raw) - _HEADER.size
    if actual != expected:
        raise NtpeError("truncated",
                        f"{path}: payload expected {expected} bytes, "
                        f"actual {actual}")
    matrix = np.frombuffer(raw, dtype=_DTYPES[kind],
                           offset=_HEADER.size).reshape(int(rows), int(cols))

    side = sidecar_path(path)
    meta = None
    if side.exists():
        meta = json.loads(side.read_text())
        for key, value in (("kind", kind), ("rows", rows), ("cols", cols)):
            if meta.get(key) != value:
                raise NtpeError(
                    "sidecar-mismatch",
                    f"{side}: {key} is {meta.get(key)}, header says {value}")
    elif require_sidecar:
        raise NtpeError("sidecar-missing", f"{side}: sidecar not found")
    return matrix.copy(), meta

"""Binary container for named tensors.

Layout (all integers little-endian):

    magic  b"IFGT"
    u32    format version (currently 1)
    u32    tensor count
    per tensor:
        u32    name length in bytes, then UTF-8 name
        u32    dtype code (0 = float32, 1 = float64)
        u32    rank
        u64    each dim
        raw    little-endian array data, C order

Used for every model checkpoint and dataset file so artifacts stay
portable between runs and machines.
"""

from __future__ import annotations

import struct
from pathlib import Path

import numpy as np

MAGIC = b"IFGT"
VERSION = 1

_DTYPE_CODES = {0: np.dtype("<f4"), 1: np.dtype("<f8")}
_CODE_FOR_KIND = {"f4": 0, "f8": 1}


class TensorFileError(ValueError):
    """Raised when a tensor file is malformed or truncated."""


def save_tensors(path, tensors: dict) -> None:
    """Write ``{name: array}`` to ``path``. Arrays must be f32 or f64."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    chunks = [MAGIC, struct.pack("<II", VERSION, len(tensors))]
    for name, arr in tensors.items():
        arr = np.ascontiguousarray(getattr(arr, "data", arr))
        key = f"{arr.dtype.kind}{arr.dtype.itemsize}"
        if key not in _CODE_FOR_KIND:
            raise TensorFileError(
                f"tensor {name!r} has unsupported dtype {arr.dtype}")
        raw = name.encode("utf-8")
        chunks.append(struct.pack("<I", len(raw)))
        chunks.append(raw)
        chunks.append(struct.pack("<II", _CODE_FOR_KIND[key], arr.ndim))
        chunks.append(struct.pack(f"<{arr.ndim}Q", *arr.shape))
        chunks.append(arr.astype(arr.dtype.newbyteorder("<"), copy=False).tobytes())
    path.write_bytes(b"".join(chunks))


def load_tensors(path) -> dict:
    """Read a tensor container back into ``{name: np.ndarray}``."""
    buf = Path(path).read_bytes()
    if buf[:4] != MAGIC:
        raise TensorFileError(f"{path}: bad magic {buf[:4]!r}")
    version, count = struct.unpack_from("<II", buf, 4)
    if version != VERSION:
        raise TensorFileError(f"{path}: unsupported version {version}")
    off = 12
    out = {}
    try:
        for _ in range(count):
            (name_len,) = struct.unpack_from("<I", buf, off)
            off += 4
            name = buf[off:off + name_len].decode("utf-8")
            off += name_len
            code, rank = struct.unpack_from("<II", buf, off)
            off += 8
            dims = struct.unpack_from(f"<{rank}Q", buf, off)
            off += 8 * rank
            dtype = _DTYPE_CODES.get(code)
            if dtype is None:
                raise TensorFileError(f"{path}: unknown dtype code {code}")
            nbytes = int(np.prod(dims, dtype=np.int64)) * dtype.itemsize
            if off + nbytes > len(buf):
                raise struct.error("data past end of file")
            arr = np.frombuffer(buf, dtype=dtype, count=int(np.prod(dims, dtype=np.int64)),
                                offset=off).reshape(dims)
            off += nbytes
            out[name] = arr.astype(dtype.newbyteorder("="), copy=True)
    except struct.error as exc:
        raise TensorFileError(f"{path}: truncated tensor file") from exc
    return out

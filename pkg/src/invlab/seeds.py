"""Labeled seed derivation.

One master seed per experiment; every stage draws its own u64 seed as
sha256(master || label), so any stage can be re-run in isolation and
still land on the same stream.
"""

from __future__ import annotations

import hashlib

import numpy as np

MASK64 = (1 << 64) - 1


def derive_seed(master: int, *labels) -> int:
    """Derive a u64 seed from a master seed and a label path.

    Labels may be strings or ints; order matters.
    """
    h = hashlib.sha256()
    h.update(int(master).to_bytes(8, "little", signed=False))
    for lab in labels:
        h.update(b"/")
        h.update(str(lab).encode("utf-8"))
    return int.from_bytes(h.digest()[:8], "little") & MASK64


def rng_for(master: int, *labels) -> np.random.Generator:
    """A PCG64 generator on the stream named by the label path."""
    return np.random.default_rng(derive_seed(master, *labels))

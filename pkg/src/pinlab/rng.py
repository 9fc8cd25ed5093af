"""Counter-based random streams keyed by structured seeds.

Every random quantity in the package is drawn from a Philox generator whose
128-bit key is a hash of a structured tuple (purpose string, fingerprints,
integer seeds).  Draw ``i`` of a stream is a pure function of the key, so
results do not depend on evaluation order or on how work is split across
workers.
"""

from __future__ import annotations

import hashlib

import numpy as np

# Half-ulp shift keeps inverse-CDF transforms off the u=0 endpoint.
_OPEN_SHIFT = 2.0 ** -54


def derive_key(*parts: int | str | bytes) -> int:
    """Derive a 128-bit Philox key from a tuple of seeds and labels."""
    h = hashlib.blake2b(digest_size=16)
    for p in parts:
        if isinstance(p, (int, np.integer)):
            h.update(b"i" + int(p).to_bytes(17, "little", signed=True))
        elif isinstance(p, str):
            h.update(b"s" + p.encode("utf-8") + b"\x00")
        elif isinstance(p, bytes):
            h.update(b"b" + p + b"\x00")
        else:
            raise TypeError(f"unsupported seed part {type(p)!r}")
    return int.from_bytes(h.digest(), "little")


def generator(*parts: int | str | bytes) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(key=derive_key(*parts)))


def uniforms(n: int, *parts: int | str | bytes) -> np.ndarray:
    """n doubles in the open interval (0, 1); value i depends only on (parts, i)."""
    return generator(*parts).random(n) + _OPEN_SHIFT

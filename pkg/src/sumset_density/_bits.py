"""Bitmask helpers: a set of small non-negative integers as a Python int.

Bit ``i`` set means ``i`` is a member. numpy is used only to move bits in and
out of big integers quickly; the sumset product is an exact integer
multiplication (Kronecker substitution) done by gmpy2.
"""

from __future__ import annotations

import numpy as np

try:
    import gmpy2
except ImportError:  # pragma: no cover - gmpy2 is a declared dependency
    gmpy2 = None

# below this popcount, shift-and-or beats packing for multiplication
_SHIFT_OR_LIMIT = 48


def low_mask(n: int) -> int:
    return (1 << n) - 1 if n > 0 else 0


def repeat(pattern: int, period: int, times: int) -> int:
    """Concatenate ``times`` copies of a ``period``-bit pattern."""
    result, pos = 0, 0
    block, width = pattern, period
    while times > 0 and pattern:
        if times & 1:
            result |= block << pos
            pos += width
        block |= block << width
        width *= 2
        times >>= 1
    return result


def from_indices(indices) -> int:
    idx = np.asarray(list(indices) if not isinstance(indices, np.ndarray) else indices,
                     dtype=np.int64)
    if idx.size == 0:
        return 0
    if idx.min() < 0:
        raise ValueError("negative index")
    bits = np.zeros(int(idx.max()) + 1, dtype=np.uint8)
    bits[idx] = 1
    return int.from_bytes(np.packbits(bits, bitorder="little").tobytes(), "little")


def to_indices(mask: int) -> np.ndarray:
    if mask == 0:
        return np.zeros(0, dtype=np.int64)
    raw = np.frombuffer(mask.to_bytes((mask.bit_length() + 7) // 8, "little"), dtype=np.uint8)
    return np.flatnonzero(np.unpackbits(raw, bitorder="little")).astype(np.int64)


def iter_bits(mask: int):
    """Yield set bit positions in increasing order (pure Python, small masks)."""
    pos = 0
    while mask:
        low = mask & -mask
        pos = low.bit_length() - 1
        yield pos
        mask ^= low


def _spread(mask: int, slot_bytes: int) -> int:
    idx = to_indices(mask)
    slots = np.zeros(mask.bit_length() * slot_bytes, dtype=np.uint8)
    slots[idx * slot_bytes] = 1
    return int.from_bytes(slots.tobytes(), "little")


def convolve(a: int, b: int, limit: int) -> int:
    """Bitmask of ``{x + y : x in a, y in b, x + y < limit}``."""
    if a == 0 or b == 0 or limit <= 0:
        return 0
    a &= low_mask(limit)
    b &= low_mask(limit)
    pa, pb = a.bit_count(), b.bit_count()
    if min(pa, pb) <= _SHIFT_OR_LIMIT:
        if pa > pb:
            a, b = b, a
        out = 0
        for i in iter_bits(a):
            out |= b << i
        return out & low_mask(limit)
    # each product slot counts representations, at most min(pa, pb)
    slot_bytes = (min(pa, pb).bit_length() + 8) // 8
    if gmpy2 is not None:
        prod = int(gmpy2.mpz(_spread(a, slot_bytes)) * gmpy2.mpz(_spread(b, slot_bytes)))
    else:  # pragma: no cover
        prod = _spread(a, slot_bytes) * _spread(b, slot_bytes)
    nslots = min(limit, a.bit_length() + b.bit_length())
    raw = prod.to_bytes(max(nslots * slot_bytes, (prod.bit_length() + 7) // 8), "little")
    slots = np.frombuffer(raw[: nslots * slot_bytes], dtype=np.uint8).reshape(nslots, slot_bytes)
    hits = np.flatnonzero(slots.any(axis=1))
    return from_indices(hits) if hits.size else 0

"""LEB128 variable-length integers (7 bits per byte, continuation bit 0x80).

Scalar helpers for header/stream parsing plus vectorized writers used by the
block encoder, where thousands of varints per scan make per-value Python
calls too slow.
"""

import numpy as np

from .errors import CorruptStreamError, TruncatedStreamError

# 10 bytes cover any uint64; nothing in the formats stores more.
MAX_VARINT_LEN = 10


def encode_uvarint(value: int) -> bytes:
    if value < 0:
        raise ValueError("varint value must be nonnegative")
    out = bytearray()
    while True:
        b = value & 0x7F
        value >>= 7
        if value:
            out.append(b | 0x80)
        else:
            out.append(b)
            return bytes(out)


def decode_uvarint(buf, offset: int = 0) -> tuple[int, int]:
    """Decode one varint from ``buf`` at ``offset``.

    Returns (value, next_offset). Raises TruncatedStreamError when the buffer
    ends mid-varint and CorruptStreamError for overlong encodings.
    """
    result = 0
    shift = 0
    pos = offset
    n = len(buf)
    while True:
        if pos >= n:
            raise TruncatedStreamError("truncated varint")
        if pos - offset >= MAX_VARINT_LEN:
            raise CorruptStreamError("varint exceeds 10 bytes")
        b = buf[pos]
        pos += 1
        result |= (b & 0x7F) << shift
        if not b & 0x80:
            return result, pos
        shift += 7


def uvarint_len(value: int) -> int:
    """Encoded length in bytes of one value."""
    return max(1, (value.bit_length() + 6) // 7)


def uvarint_len_array(values: np.ndarray) -> np.ndarray:
    """Encoded lengths for an array of nonnegative integers (any uint dtype)."""
    v = np.asarray(values, dtype=np.uint64)
    lens = np.ones(v.shape, dtype=np.int64)
    threshold = np.uint64(1 << 7)
    while True:
        mask = v >= threshold
        if not mask.any():
            return lens
        lens[mask] += 1
        if int(threshold) >= 1 << 63:
            return lens
        threshold = np.uint64(int(threshold) << 7)


def write_uvarints(out: np.ndarray, positions: np.ndarray, values: np.ndarray,
                   lengths: np.ndarray | None = None) -> np.ndarray:
    """Write one varint per element of ``values`` into the uint8 array ``out``.

    ``positions`` gives each varint's starting byte offset. Returns the array
    of offsets one past each written varint. Offsets may not overlap.
    """
    v = np.asarray(values, dtype=np.uint64)
    if lengths is None:
        lengths = uvarint_len_array(v)
    max_len = int(lengths.max(initial=1))
    for k in range(max_len):
        sel = lengths > k
        if not sel.any():
            break
        chunk = (v[sel] >> np.uint64(7 * k)).astype(np.uint64) & np.uint64(0x7F)
        cont = np.where(lengths[sel] - 1 > k, np.uint64(0x80), np.uint64(0))
        out[positions[sel] + k] = (chunk | cont).astype(np.uint8)
    return positions + lengths

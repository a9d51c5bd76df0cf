"""Zero-sample bitmasks and value-stream compaction.

A mask is a 2D bool array the same shape as its scan: True where the sample
is zero (out of range), False where it carries a value. Masks apply to every
scan type, not just ranges; sparse attribute planes benefit the same way.
"""

import numpy as np

from .errors import CorruptStreamError


def extract_mask(samples: np.ndarray) -> np.ndarray:
    """True at every zero sample."""
    return np.asarray(samples) == 0


def compact(samples: np.ndarray, mask: np.ndarray) -> np.ndarray:
    """Row-major samples at mask-False positions, as a 1D uint32 vector."""
    samples = np.asarray(samples)
    if samples.shape != mask.shape:
        raise ValueError("mask shape does not match samples")
    return samples[~mask].astype(np.uint32, copy=False).ravel()


def expand(values: np.ndarray, mask: np.ndarray, dtype) -> np.ndarray:
    """Inverse of :func:`compact`: zeros where masked, values elsewhere."""
    values = np.asarray(values)
    n = int(mask.size - np.count_nonzero(mask))
    if values.size != n:
        raise CorruptStreamError(
            f"value count {values.size} does not match mask ({n} clear bits)")
    out = np.zeros(mask.shape, dtype=dtype)
    out[~mask] = values
    return out


def xor_mask(current: np.ndarray, previous: np.ndarray) -> np.ndarray:
    if current.shape != previous.shape:
        raise ValueError("mask shapes differ")
    return current ^ previous


def pack_mask(mask: np.ndarray) -> bytes:
    """Row-major bits, LSB-first within each byte, last byte zero-padded."""
    return np.packbits(mask.ravel(), bitorder="little").tobytes()


def unpack_mask(data: bytes, shape: tuple[int, int]) -> np.ndarray:
    rows, cols = shape
    n = rows * cols
    if len(data) != (n + 7) // 8:
        raise CorruptStreamError("packed mask length does not match shape")
    bits = np.unpackbits(np.frombuffer(data, dtype=np.uint8),
                         bitorder="little")
    if bits[n:].any():
        raise CorruptStreamError("nonzero padding bits in packed mask")
    return bits[:n].astype(bool).reshape(rows, cols)

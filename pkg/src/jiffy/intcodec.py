"""Value-stream integer transforms: delta coding, ZigZag, and patched
frame-of-reference (PFOR) bitpacking of unsigned 32-bit integers.

PFOR stream layout (frozen wire format, see FORMAT.md):

    [value_count: varint]
    per block of up to 128 values:
        [reference: varint]        minimum of the block
        [bit_width: 1 byte]        0..32
        [exception_count: varint]
        [packed offsets]           ceil(block_len * bit_width / 8) bytes,
                                   value i at bit positions [i*b, (i+1)*b),
                                   LSB-first within the byte stream
        [exception positions]      1 byte each, strictly increasing
        [exception remainders]     varint each, storing offset >> bit_width

Every value is stored as an offset from the block minimum. The packed area
holds the low ``bit_width`` bits of every offset; offsets that do not fit
contribute an exception carrying the remaining high bits. Per block the
encoder evaluates all 33 candidate widths and keeps the cheapest total,
breaking ties toward the smaller width, so the emitted size is the format's
per-block optimum by construction.

Two delta/ZigZag variants live here. ``delta_encode``/``zigzag_encode`` are
the exact integer operations: deltas are true differences (33-bit signed),
ZigZag(x) = 2|x| + [x < 0] with |x| < 2^31. The ``*_wrap`` array variants
evaluate the same formulas in uint32 modular arithmetic, which makes the
composed map a total bijection on uint32 streams; the wrapped delta -2^31
lands on code 1, the one code the exact encoder never produces. The scan
codec uses the wrapped variants so arbitrary 32-bit samples roundtrip.
"""

from dataclasses import dataclass, field

import numpy as np

from .errors import CorruptStreamError, TruncatedStreamError
from .varint import (decode_uvarint, encode_uvarint, uvarint_len_array,
                     write_uvarints)

BLOCK_SIZE = 128

_U32_MAX = 0xFFFFFFFF

# Remainder varint bytes by (offset bit length, candidate width): ceil((l-b)/7).
_L = np.arange(33)
_REM_BYTES = np.where(_L[:, None] > _L[None, :],
                      (_L[:, None] - _L[None, :] + 6) // 7, 0).astype(np.int64)
_REM_BYTES_F = _REM_BYTES.astype(np.float64)


# ---------------------------------------------------------------------------
# delta


def delta_encode(values) -> np.ndarray:
    """Difference each value from its predecessor; the first value is kept
    as a delta from an implicit 0. Output is int64 (true 33-bit differences).
    """
    v = _as_u32(values)
    out = np.empty(v.size, dtype=np.int64)
    if v.size:
        s = v.astype(np.int64)
        out[0] = s[0]
        np.subtract(s[1:], s[:-1], out=out[1:])
    return out


def delta_decode(deltas) -> np.ndarray:
    """Exact inverse of :func:`delta_encode`.

    Raises CorruptStreamError when any prefix sum leaves [0, 2^32), which can
    only happen for delta vectors that no uint32 input produces.
    """
    d = np.asarray(deltas, dtype=np.int64)
    acc = np.cumsum(d)
    if d.size and (acc.min() < 0 or acc.max() > _U32_MAX):
        raise CorruptStreamError("delta prefix sum outside uint32 range")
    return acc.astype(np.uint32)


def delta_wrap(values: np.ndarray) -> np.ndarray:
    """Modular uint32 delta: out[i] = (v[i] - v[i-1]) mod 2^32, v[-1] = 0."""
    v = _as_u32(values)
    return np.diff(v, prepend=np.uint32(0))


def delta_unwrap(deltas: np.ndarray) -> np.ndarray:
    """Inverse of :func:`delta_wrap` (modular prefix sum)."""
    d = _as_u32(deltas)
    return np.cumsum(d, dtype=np.uint32)


# ---------------------------------------------------------------------------
# zigzag


def zigzag_encode(x: int) -> int:
    """Map a signed integer to an unsigned code: 2|x| + (1 if x < 0 else 0).

    Small magnitudes land on small codes regardless of sign. Code 1 is never
    produced (it would be "-0").
    """
    if not -(1 << 31) < x < (1 << 31):
        raise ValueError("zigzag input must satisfy |x| < 2^31")
    return 2 * abs(x) + (1 if x < 0 else 0)


def zigzag_decode(u: int) -> int:
    """Inverse of :func:`zigzag_encode`; the unreachable code 1 decodes to 0."""
    if u < 0:
        raise ValueError("zigzag code must be nonnegative")
    half = u >> 1
    return -half if u & 1 else half


def zigzag_wrap(deltas: np.ndarray) -> np.ndarray:
    """ZigZag over uint32 words holding two's-complement signed values.

    Evaluates 2|x| + [x < 0] in modular uint32 arithmetic. Total on uint32:
    the word 0x80000000 (signed -2^31) wraps onto code 1.
    """
    u = _as_u32(deltas)
    neg = (u >> np.uint32(31)).astype(np.uint32)
    sign = np.uint32(0) - neg                    # 0x00000000 or 0xFFFFFFFF
    mag = (u ^ sign) + neg                       # two's-complement |x|
    return (mag << np.uint32(1)) + neg


def zigzag_unwrap(codes: np.ndarray) -> np.ndarray:
    """Inverse of :func:`zigzag_wrap`."""
    c = _as_u32(codes)
    half = c >> np.uint32(1)
    odd = (c & np.uint32(1)).astype(bool)
    out = np.where(odd, np.uint32(0) - half, half)
    if odd.any():
        out = np.where(c == np.uint32(1), np.uint32(0x80000000), out)
    return out.astype(np.uint32, copy=False)


# ---------------------------------------------------------------------------
# PFOR


@dataclass
class PackedBlock:
    """Parsed view of one block, for inspection and tests."""

    reference: int
    bit_width: int
    length: int
    exceptions: list[tuple[int, int]] = field(default_factory=list)


def pfor_encode(values) -> bytes:
    """Pack unsigned 32-bit integers into the PFOR block format."""
    v = _as_u32(values)
    n = v.size
    out = [encode_uvarint(n)]
    if n == 0:
        return out[0]
    nfull = n // BLOCK_SIZE
    if nfull:
        out.append(_encode_blocks(v[:nfull * BLOCK_SIZE].reshape(nfull, BLOCK_SIZE)))
    tail = n - nfull * BLOCK_SIZE
    if tail:
        out.append(_encode_blocks(v[n - tail:].reshape(1, tail)))
    return b"".join(out)


def pfor_decode(data) -> np.ndarray:
    """Exact inverse of :func:`pfor_encode`.

    Raises TruncatedStreamError / CorruptStreamError on malformed input;
    never returns partial output.
    """
    buf = bytes(data)
    total = len(buf)
    n, pos = decode_uvarint(buf, 0)
    # Cheapest legal block is ~3 bytes per 128 values; larger counts cannot
    # be backed by this buffer, so reject before allocating.
    if n > (total // 3 + 1) * BLOCK_SIZE:
        raise CorruptStreamError("value count larger than stream could hold")
    out = np.empty(n, dtype=np.uint32)

    # Header scan collects per-block geometry; payloads are unpacked in bulk
    # afterwards, grouped by width.
    refs, widths, offs, lens = [], [], [], []
    exceptions = []                         # (block_idx, position, remainder)
    produced = 0
    while produced < n:
        blen = min(BLOCK_SIZE, n - produced)
        ref, pos = decode_uvarint(buf, pos)
        if ref > _U32_MAX:
            raise CorruptStreamError("block reference exceeds uint32")
        if pos >= total:
            raise TruncatedStreamError("truncated block header")
        width = buf[pos]
        pos += 1
        if width > 32:
            raise CorruptStreamError(f"bit width {width} exceeds 32")
        exc_count, pos = decode_uvarint(buf, pos)
        if exc_count > blen:
            raise CorruptStreamError("exception count exceeds block length")
        nbytes = (blen * width + 7) // 8
        if pos + nbytes > total:
            raise TruncatedStreamError("truncated block payload")
        block_idx = len(refs)
        refs.append(ref)
        widths.append(width)
        offs.append(pos)
        lens.append(blen)
        pos += nbytes
        if exc_count:
            if pos + exc_count > total:
                raise TruncatedStreamError("truncated exception positions")
            positions = buf[pos:pos + exc_count]
            pos += exc_count
            last = -1
            for p in positions:
                if p <= last or p >= blen:
                    raise CorruptStreamError("exception positions not strictly "
                                             "increasing within block")
                last = p
            rem_limit = _U32_MAX >> width
            for p in positions:
                rem, pos = decode_uvarint(buf, pos)
                if rem > rem_limit:
                    raise CorruptStreamError("exception remainder overflows uint32")
                exceptions.append((block_idx, p, rem))
        produced += blen
    if pos != total:
        raise CorruptStreamError("trailing bytes after final block")
    if n == 0:
        return out

    widths_arr = np.asarray(widths, dtype=np.int64)
    _unpack_blocks(buf, np.asarray(refs, dtype=np.uint32), widths_arr,
                   np.asarray(offs, dtype=np.int64),
                   np.asarray(lens, dtype=np.int64), out)
    for bi, p, rem in exceptions:
        idx = bi * BLOCK_SIZE + p
        val = int(out[idx]) + (rem << int(widths_arr[bi]))
        if val > _U32_MAX:
            raise CorruptStreamError("patched value overflows uint32")
        out[idx] = val
    return out


def iter_blocks(data):
    """Yield a :class:`PackedBlock` per block. Assumes a well-formed stream."""
    buf = bytes(data)
    n, pos = decode_uvarint(buf, 0)
    produced = 0
    while produced < n:
        blen = min(BLOCK_SIZE, n - produced)
        ref, pos = decode_uvarint(buf, pos)
        width = buf[pos]
        pos += 1
        exc_count, pos = decode_uvarint(buf, pos)
        pos += (blen * width + 7) // 8
        positions = buf[pos:pos + exc_count]
        pos += exc_count
        exc = []
        for p in positions:
            rem, pos = decode_uvarint(buf, pos)
            exc.append((p, rem))
        yield PackedBlock(ref, width, blen, exc)
        produced += blen


# ---------------------------------------------------------------------------
# internals


def _as_u32(values) -> np.ndarray:
    a = np.asarray(values)
    if a.dtype == np.uint32:
        return np.ascontiguousarray(a)
    if a.dtype.kind not in "ui":
        raise ValueError(f"expected integer values, got dtype {a.dtype}")
    if a.size:
        lo = int(a.min())
        hi = int(a.max())
        if lo < 0 or hi > _U32_MAX:
            raise ValueError("values outside uint32 range")
    return np.ascontiguousarray(a.astype(np.uint32))


def _bit_lengths(a: np.ndarray) -> np.ndarray:
    # frexp's exponent equals bit_length for positive integers (exact < 2^53)
    _, e = np.frexp(a.astype(np.float64))
    return e.astype(np.int64)


def _pack_bits(offsets: np.ndarray, width: int) -> np.ndarray:
    """Pack the low ``width`` bits of each uint32, LSB-first.

    offsets: (m, blen) uint32 -> (m, ceil(blen*width/8)) uint8.
    """
    m, blen = offsets.shape
    nb = (width + 7) // 8
    as_bytes = np.ascontiguousarray(offsets.astype("<u4", copy=False)) \
        .view(np.uint8).reshape(m, blen, 4)[:, :, :nb]
    bits = np.unpackbits(np.ascontiguousarray(as_bytes), axis=2,
                         bitorder="little")                       # (m, blen, 8*nb)
    lane = np.ascontiguousarray(bits[:, :, :width]).reshape(m, blen * width)
    return np.packbits(lane, axis=1, bitorder="little")


def _unpack_bits(payload: np.ndarray, width: int, blen: int) -> np.ndarray:
    """Inverse of :func:`_pack_bits`. payload: (m, nbytes) -> (m, blen) uint32."""
    m = payload.shape[0]
    nb = (width + 7) // 8
    bits = np.unpackbits(payload, axis=1, bitorder="little")[:, :blen * width]
    lanes = np.zeros((m, blen, 8 * nb), dtype=np.uint8)
    lanes[:, :, :width] = bits.reshape(m, blen, width)
    packed = np.packbits(lanes.reshape(m, blen * 8 * nb), axis=1,
                         bitorder="little").reshape(m, blen, nb)
    out = np.zeros((m, blen, 4), dtype=np.uint8)
    out[:, :, :nb] = packed
    return out.view("<u4").reshape(m, blen)


def _encode_blocks(v: np.ndarray) -> bytes:
    """Encode uniform-length blocks. v: (nblk, blen) uint32, blen <= 128."""
    nblk, blen = v.shape
    refs = v.min(axis=1)
    off = v - refs[:, None]
    bitlen = _bit_lengths(off)                                    # (nblk, blen)

    # Per-block histogram over offset bit lengths, 33 bins.
    idx = (np.arange(nblk, dtype=np.int64)[:, None] * 33 + bitlen).ravel()
    hist = np.bincount(idx, minlength=nblk * 33).reshape(nblk, 33)

    # exc[:, b] = number of offsets with bit length > b
    tail_counts = hist[:, ::-1].cumsum(axis=1)[:, ::-1]           # >= l
    exc = np.zeros((nblk, 33), dtype=np.int64)
    exc[:, :32] = tail_counts[:, 1:]
    # varint remainder bytes; counts <= 128 and factors <= 5, exact in float64
    rem_bytes = (hist.astype(np.float64) @ _REM_BYTES_F).astype(np.int64)
    payload_bytes = (blen * np.arange(33, dtype=np.int64) + 7) // 8

    ref_vlen = uvarint_len_array(refs)
    exc_vlen = 1 + (exc >= 128)
    cost = (ref_vlen[:, None] + 1 + exc_vlen + payload_bytes[None, :]
            + exc + rem_bytes)
    bw = cost.argmin(axis=1)                                      # ties -> smaller width
    rows = np.arange(nblk)
    sizes = cost[rows, bw]

    starts = np.zeros(nblk + 1, dtype=np.int64)
    np.cumsum(sizes, out=starts[1:])
    buf = np.zeros(int(starts[-1]), dtype=np.uint8)

    pos = write_uvarints(buf, starts[:-1], refs, ref_vlen)
    buf[pos] = bw
    pos += 1
    exc_counts = exc[rows, bw]
    pos = write_uvarints(buf, pos, exc_counts.astype(np.uint64),
                         exc_vlen[rows, bw])

    for width in np.unique(bw):
        if width == 0:
            continue
        sel = np.nonzero(bw == width)[0]
        packed = _pack_bits(off[sel], int(width))
        buf[pos[sel, None] + np.arange(packed.shape[1])] = packed
    exc_start = pos + payload_bytes[bw]

    total_exc = int(exc_counts.sum())
    if total_exc:
        eblk, epos = np.nonzero(bitlen > bw[:, None])
        evals = off[eblk, epos] >> bw[eblk].astype(np.uint32)
        evlen = uvarint_len_array(evals)
        block_first = np.zeros(nblk + 1, dtype=np.int64)
        np.cumsum(exc_counts, out=block_first[1:])
        rank = np.arange(total_exc, dtype=np.int64) - block_first[eblk]
        buf[exc_start[eblk] + rank] = epos
        g = np.zeros(total_exc + 1, dtype=np.int64)
        np.cumsum(evlen, out=g[1:])
        rem_off = g[:-1] - g[block_first[eblk]]
        write_uvarints(buf, exc_start[eblk] + exc_counts[eblk] + rem_off,
                       evals, evlen)
    return buf.tobytes()


def _unpack_blocks(buf: bytes, refs, widths, offs, lens, out: np.ndarray):
    arr = np.frombuffer(buf, dtype=np.uint8)
    nblk = refs.size
    has_tail = bool(nblk) and lens[-1] != BLOCK_SIZE
    nfull = nblk - 1 if has_tail else nblk
    if nfull:
        view = out[:nfull * BLOCK_SIZE].reshape(nfull, BLOCK_SIZE)
        fw = widths[:nfull]
        for width in np.unique(fw):
            w = int(width)
            sel = np.nonzero(fw == width)[0]
            if w == 0:
                vals = np.zeros((sel.size, BLOCK_SIZE), dtype=np.uint32)
            else:
                nbytes = (BLOCK_SIZE * w + 7) // 8
                payload = arr[offs[sel, None] + np.arange(nbytes)]
                vals = _unpack_bits(payload, w, BLOCK_SIZE)
            _apply_reference(vals, refs[sel])
            view[sel] = vals
    if has_tail:
        blen = int(lens[-1])
        w = int(widths[-1])
        if w == 0:
            vals = np.zeros((1, blen), dtype=np.uint32)
        else:
            nbytes = (blen * w + 7) // 8
            payload = arr[int(offs[-1]):int(offs[-1]) + nbytes][None, :]
            vals = _unpack_bits(payload, w, blen)
        _apply_reference(vals, refs[-1:])
        out[nfull * BLOCK_SIZE:] = vals[0]


def _apply_reference(vals: np.ndarray, refs: np.ndarray):
    # Detect uint32 overflow (only corrupt streams produce it).
    risky = refs.astype(np.int64) + vals.max(axis=1) > _U32_MAX
    if risky.any():
        raise CorruptStreamError("block value overflows uint32")
    vals += refs[:, None]

"""Independent scalar reference implementations used as test oracles.

Everything here is written directly from the wire format description in
FORMAT.md, pure Python, no numpy, no sharing of code with the library.
Deliberately slow and obvious.
"""

BLOCK = 128
U32 = 0xFFFFFFFF


def ref_varint(value: int) -> bytes:
    out = bytearray()
    while True:
        b = value & 0x7F
        value >>= 7
        if value:
            out.append(b | 0x80)
        else:
            out.append(b)
            return bytes(out)


def ref_read_varint(buf: bytes, pos: int):
    shift = 0
    result = 0
    while True:
        b = buf[pos]
        pos += 1
        result |= (b & 0x7F) << shift
        if not b & 0x80:
            return result, pos
        shift += 7


def ref_block_cost(block, width: int) -> int:
    """Exact serialized size of one block at a given bit width."""
    ref = min(block)
    offsets = [v - ref for v in block]
    cost = len(ref_varint(ref)) + 1                 # reference + width byte
    exceptions = [o for o in offsets if o.bit_length() > width]
    cost += len(ref_varint(len(exceptions)))
    cost += (len(block) * width + 7) // 8           # packed area
    cost += len(exceptions)                         # position bytes
    for o in exceptions:
        cost += len(ref_varint(o >> width))
    return cost


def ref_optimal_width(block) -> int:
    """Brute-force best width, ties toward the smaller width."""
    best_w, best_c = 0, ref_block_cost(block, 0)
    for w in range(1, 33):
        c = ref_block_cost(block, w)
        if c < best_c:
            best_w, best_c = w, c
    return best_w


def ref_pfor_encode(values) -> bytes:
    """Scalar PFOR encoder: per-block exhaustive width search."""
    values = [int(v) for v in values]
    out = bytearray(ref_varint(len(values)))
    for i in range(0, len(values), BLOCK):
        block = values[i:i + BLOCK]
        ref = min(block)
        offsets = [v - ref for v in block]
        w = ref_optimal_width(block)
        out += ref_varint(ref)
        out.append(w)
        exc = [(p, o >> w) for p, o in enumerate(offsets) if o.bit_length() > w]
        out += ref_varint(len(exc))
        # pack low w bits, value i at bit positions [i*w, (i+1)*w), LSB first
        acc = 0
        for p, o in enumerate(offsets):
            acc |= (o & ((1 << w) - 1)) << (p * w)
        out += acc.to_bytes((len(block) * w + 7) // 8, "little")
        for p, _ in exc:
            out.append(p)
        for _, rem in exc:
            out += ref_varint(rem)
    return bytes(out)


def ref_pfor_decode(buf: bytes):
    n, pos = ref_read_varint(buf, 0)
    values = []
    while len(values) < n:
        blen = min(BLOCK, n - len(values))
        ref, pos = ref_read_varint(buf, pos)
        w = buf[pos]
        pos += 1
        nexc, pos = ref_read_varint(buf, pos)
        nbytes = (blen * w + 7) // 8
        acc = int.from_bytes(buf[pos:pos + nbytes], "little")
        pos += nbytes
        block = [ref + ((acc >> (i * w)) & ((1 << w) - 1)) for i in range(blen)]
        positions = list(buf[pos:pos + nexc])
        pos += nexc
        for p in positions:
            rem, pos = ref_read_varint(buf, pos)
            block[p] += rem << w
        values.extend(block)
    assert pos == len(buf), "trailing bytes"
    return values


def ref_zigzag(x: int) -> int:
    return 2 * abs(x) + (1 if x < 0 else 0)


def ref_wrapped_pipeline_encode(values):
    """delta -> zigzag evaluated in uint32 modular arithmetic, scalar."""
    out = []
    prev = 0
    for v in values:
        d = (int(v) - prev) & U32
        prev = int(v)
        signed = d - (1 << 32) if d >= 1 << 31 else d
        out.append((2 * abs(signed) + (1 if signed < 0 else 0)) & U32)
    return out


def ref_wrapped_pipeline_decode(codes):
    out = []
    prev = 0
    for c in codes:
        c = int(c)
        if c == 1:
            d = 1 << 31                              # wrapped -2^31
        elif c & 1:
            d = (-(c >> 1)) & U32
        else:
            d = c >> 1
        prev = (prev + d) & U32
        out.append(prev)
    return out

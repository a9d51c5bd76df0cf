import numpy as np
import pytest
from hypothesis import given, strategies as st

from jiffy.bitmask import (compact, expand, extract_mask, pack_mask,
                           unpack_mask, xor_mask)
from jiffy.errors import CorruptStreamError

shapes = st.tuples(st.integers(1, 20), st.integers(1, 40))


def rand_mask(shape, seed=0):
    return np.random.default_rng(seed).random(shape) < 0.4


def test_extract_mask_counts():
    rng = np.random.default_rng(1)
    s = rng.integers(0, 3, size=(13, 17), dtype=np.uint16)
    m = extract_mask(s)
    assert int(m.sum()) == int((s == 0).sum())
    assert extract_mask(np.zeros((2, 2), np.uint8)).all()
    assert not extract_mask(np.ones((2, 2), np.uint8)).any()


def test_compact_known():
    s = np.array([[0, 5, 0, 7]], dtype=np.uint16)
    assert compact(s, extract_mask(s)).tolist() == [5, 7]
    z = np.zeros((3, 3), dtype=np.uint16)
    assert compact(z, extract_mask(z)).size == 0


def test_compact_shape_mismatch():
    with pytest.raises(ValueError):
        compact(np.zeros((2, 2), np.uint8), np.zeros((2, 3), bool))


@given(shapes, st.integers(0, 1000))
def test_compact_expand_roundtrip(shape, seed):
    rng = np.random.default_rng(seed)
    s = rng.integers(0, 4, size=shape, dtype=np.uint16)
    m = extract_mask(s)
    back = expand(compact(s, m), m, np.uint16)
    assert np.array_equal(back, s)


def test_expand_length_mismatch():
    m = np.array([[True, False, False]])
    with pytest.raises(CorruptStreamError):
        expand(np.array([1], dtype=np.uint32), m, np.uint16)


def test_xor_known():
    m = rand_mask((5, 9))
    assert not xor_mask(m, m).any()
    z = np.zeros_like(m)
    assert np.array_equal(xor_mask(m, z), m)
    with pytest.raises(ValueError):
        xor_mask(m, rand_mask((5, 8)))


@given(shapes, st.integers(0, 1000))
def test_xor_involution(shape, seed):
    a = rand_mask(shape, seed)
    b = rand_mask(shape, seed + 1)
    assert np.array_equal(xor_mask(xor_mask(a, b), b), a)


def test_pack_known():
    m = np.array([[1, 0, 0, 0, 0, 0, 0, 0]], dtype=bool)
    assert pack_mask(m) == b"\x01"                  # LSB-first
    m9 = np.ones((1, 9), dtype=bool)
    assert pack_mask(m9) == b"\xff\x01"             # padding stays zero


@given(shapes, st.integers(0, 1000))
def test_pack_unpack_roundtrip(shape, seed):
    m = rand_mask(shape, seed)
    data = pack_mask(m)
    assert len(data) == (m.size + 7) // 8
    assert np.array_equal(unpack_mask(data, shape), m)


def test_unpack_rejects_bad_input():
    with pytest.raises(CorruptStreamError):
        unpack_mask(b"\x00\x00", (1, 8))            # wrong length
    with pytest.raises(CorruptStreamError):
        unpack_mask(b"\xff\x02", (1, 9))            # nonzero padding bit

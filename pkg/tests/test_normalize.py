import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from debias import (BitString, QaryString, ValidationError, delete_symbol,
                    parity_normalize, peres_normalize, vn_encode, vn_normalize,
                    vn_pair, vn_preimage)


def all_strings(n):
    return (BitString.from_int(v, n) for v in range(1 << n))


def test_vn_pair_table():
    assert vn_pair(0, 1) == 0
    assert vn_pair(1, 0) == 1
    assert vn_pair(1, 1) is None
    assert vn_pair(0, 0) is None
    with pytest.raises(ValidationError):
        vn_pair(2, 0)


def test_pair_encode_inverse():
    assert vn_encode(BitString("01")) == BitString("0110")
    for b in (0, 1):
        pair = vn_encode(BitString([b]))
        assert vn_pair(pair[0], pair[1]) == b


def test_vn_normalize_examples():
    assert vn_normalize(BitString("0110")) == BitString("01")
    assert vn_normalize(BitString("0011")) == BitString("")
    assert vn_normalize(BitString("01101")) == BitString("01")  # odd tail dropped


@given(st.lists(st.integers(0, 1), max_size=80).filter(lambda a: len(a) % 2 == 0),
       st.lists(st.integers(0, 1), max_size=80))
def test_vn_concatenation_consistency(a, b):
    x, y = BitString(a), BitString(b)
    assert vn_normalize(x + y) == vn_normalize(x) + vn_normalize(y)


def test_vn_output_length_bound():
    rng = np.random.default_rng(0)
    x = BitString.from_array(rng.integers(0, 2, 1001, dtype=np.uint8))
    assert len(vn_normalize(x)) <= 500


def test_vn_preimage_examples():
    assert vn_preimage(BitString("0"), 2) == {BitString("01")}
    got = vn_preimage(BitString("0"), 4)
    assert got == {BitString(s) for s in ("0001", "1101", "0100", "0111")}
    for z in got:
        assert vn_normalize(z) == BitString("0")
    assert vn_preimage(BitString(""), 2) == {BitString("00"), BitString("11")}


def test_vn_preimage_guards():
    with pytest.raises(ValidationError):
        vn_preimage(BitString("01"), 3)  # n < 2m
    with pytest.raises(ValidationError):
        vn_preimage(BitString("0"), 27)


@pytest.mark.parametrize("n", [2, 3, 6, 9, 13, 14])
def test_vn_preimage_matches_brute_force(n):
    by_output = {}
    for z in all_strings(n):
        by_output.setdefault(vn_normalize(z), set()).add(z)
    for m in range(0, n // 2 + 1):
        for yv in range(1 << m):
            y = BitString.from_int(yv, m)
            assert vn_preimage(y, n) == by_output.get(y, set())


def test_peres_examples():
    assert peres_normalize(BitString("0101")) == BitString("00")
    assert peres_normalize(BitString("0011")) == BitString("0")
    assert peres_normalize(BitString("0")) == BitString("")
    assert peres_normalize(BitString("")) == BitString("")


def test_peres_dominates_vn_random():
    rng = np.random.default_rng(12)
    for _ in range(200):
        x = BitString.from_array(rng.integers(0, 2, int(rng.integers(0, 200)),
                                              dtype=np.uint8))
        assert len(peres_normalize(x)) >= len(vn_normalize(x))


def test_peres_dominates_vn_exhaustive_small():
    for n in range(0, 11):
        for x in all_strings(n):
            assert len(peres_normalize(x)) >= len(vn_normalize(x))


def test_parity_examples():
    assert parity_normalize(BitString("0111"), 2) == BitString("10")
    assert parity_normalize(BitString("0000"), 2) == BitString("00")
    assert parity_normalize(BitString("01101"), 2) == BitString("11")  # odd tail dropped
    assert parity_normalize(BitString("011010"), 3) == BitString("01")
    with pytest.raises(ValidationError):
        parity_normalize(BitString("01"), 1)


def test_delete_symbol_examples():
    x = QaryString.from_letters("cabcb", "abc")
    assert delete_symbol(x, 2).to_letters("abc") == "abb"
    assert delete_symbol(QaryString.from_letters("ccc", "abc"), 2) == QaryString([], 3)
    assert delete_symbol(QaryString.from_letters("ab", "abc"), 2).to_letters("abc") == "ab"
    y = delete_symbol(x, 2)
    assert delete_symbol(y, 2) == y  # idempotent
    with pytest.raises(ValidationError):
        delete_symbol(x, 3)


def test_stream_chunk_consistency_million():
    rng = np.random.default_rng(77)
    x = BitString.from_array(rng.integers(0, 2, 10**6, dtype=np.uint8))
    # random even-length chunking
    cuts = np.sort(rng.choice(np.arange(2, 10**6, 2), size=50, replace=False))
    pieces = []
    lo = 0
    for hi in list(cuts) + [10**6]:
        pieces.append(x[int(lo):int(hi)])
        lo = hi
    vn_chunked = BitString("")
    for piece in pieces:
        vn_chunked.extend(vn_normalize(piece))
    assert vn_chunked == vn_normalize(x)
    # parity with block 4: cut points are multiples of 4
    cuts4 = np.sort(rng.choice(np.arange(4, 10**6, 4), size=50, replace=False))
    par_chunked = BitString("")
    lo = 0
    for hi in list(cuts4) + [10**6]:
        par_chunked.extend(parity_normalize(x[int(lo):int(hi)], 4))
        lo = hi
    assert par_chunked == parity_normalize(x, 4)


def test_collapse_padding_is_invisible():
    # inserting discarded pairs between encoded bits never changes the output
    rng = np.random.default_rng(5)
    for _ in range(50):
        m = int(rng.integers(0, 6))
        y = BitString.from_array(rng.integers(0, 2, m, dtype=np.uint8))
        body = BitString("")
        for bit in y:
            for _ in range(int(rng.integers(0, 3))):
                body.extend(BitString("00") if rng.random() < 0.5 else BitString("11"))
            body.extend(vn_encode(BitString([bit])))
        for _ in range(int(rng.integers(0, 3))):
            body.extend(BitString("00") if rng.random() < 0.5 else BitString("11"))
        assert vn_normalize(body) == y

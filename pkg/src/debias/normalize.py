"""Un-biasing transformations.

The von Neumann step maps disjoint bit pairs 01 -> 0, 10 -> 1 and discards
equal pairs; a trailing odd bit is ignored.  The iterated variant reuses the
pair-XOR stream and the first bits of the discarded pairs to squeeze out more
output.  The parity method XORs disjoint fixed-size blocks.  All operations
here are pure.
"""

from __future__ import annotations

from itertools import product

import numpy as np

from .bits import BitString, QaryString
from .errors import ValidationError

MAX_PREIMAGE_N = 26


def vn_pair(b1: int, b2: int) -> int | None:
    """One von Neumann step: None for an equal pair, else the first bit."""
    if b1 not in (0, 1) or b2 not in (0, 1):
        raise ValidationError("vn_pair needs two bits")
    return None if b1 == b2 else b1


def vn_encode(y: BitString) -> BitString:
    """Map each bit b to the unequal pair b, 1-b (the canonical preimage)."""
    arr = y.to_array()
    out = np.empty(2 * len(arr), dtype=np.uint8)
    out[0::2] = arr
    out[1::2] = 1 - arr
    return BitString.from_array(out)


def vn_normalize(x: BitString) -> BitString:
    """Von Neumann output over all disjoint pairs; trailing odd bit ignored."""
    arr = x.to_array()
    k = len(arr) // 2
    a = arr[0 : 2 * k : 2]
    b = arr[1 : 2 * k : 2]
    return BitString.from_array(a[a != b])


def _compositions(total: int, parts: int):
    """All tuples of `parts` nonnegative ints summing to `total`."""
    if parts == 1:
        yield (total,)
        return
    for first in range(total + 1):
        for rest in _compositions(total - first, parts - 1):
            yield (first,) + rest


def vn_preimage(y: BitString, n: int) -> set[BitString]:
    """All length-n strings whose von Neumann output is exactly ``y``.

    Each member interleaves the unequal pairs encoding y's bits with runs of
    discarded (equal) pairs in the m+1 gaps, plus an ignored trailing bit when
    n - 2|y| is odd.
    """
    m = len(y)
    if n > MAX_PREIMAGE_N:
        raise ValidationError(f"n = {n} exceeds the enumeration guard {MAX_PREIMAGE_N}")
    if n < 2 * m:
        raise ValidationError(f"n = {n} is too short to normalize to {m} bits")
    pad = n - 2 * m
    tails = ("",) if pad % 2 == 0 else ("0", "1")
    cores = [("01" if bit == 0 else "10") for bit in y]
    out = set()
    for comp in _compositions(pad // 2, m + 1):
        gap_choices = [list(product(("00", "11"), repeat=c)) for c in comp]
        for gaps in product(*gap_choices):
            parts = []
            for i in range(m):
                parts.append("".join(gaps[i]))
                parts.append(cores[i])
            parts.append("".join(gaps[m]))
            body = "".join(parts)
            for tail in tails:
                out.add(BitString(body + tail))
    return out


def _peres_chunks(arr: np.ndarray, sink: list) -> None:
    if arr.size < 2:
        return
    k = arr.size // 2
    a = arr[0 : 2 * k : 2]
    b = arr[1 : 2 * k : 2]
    diff = a != b
    kept = a[diff]
    if kept.size:
        sink.append(kept)
    _peres_chunks(a ^ b, sink)     # pair parities
    _peres_chunks(a[~diff], sink)  # halves of the discarded pairs


def peres_normalize(x: BitString) -> BitString:
    """Iterated von Neumann extraction: the plain output, then recursion on
    the pair-XOR stream and on the discarded-pair halves."""
    sink: list = []
    _peres_chunks(x.to_array(), sink)
    if not sink:
        return BitString()
    return BitString.from_array(np.concatenate(sink))


def parity_normalize(x: BitString, block: int) -> BitString:
    """XOR of each disjoint ``block``-bit group; trailing partial block dropped."""
    if block < 2:
        raise ValidationError(f"block length must be >= 2, got {block}")
    arr = x.to_array()
    k = len(arr) // block
    grouped = arr[: k * block].reshape(k, block)
    return BitString.from_array(np.bitwise_xor.reduce(grouped, axis=1))


def delete_symbol(x: QaryString, symbol: int) -> QaryString:
    """Erase every occurrence of one symbol, keeping the rest in order."""
    if not 0 <= symbol < x.q:
        raise ValidationError(f"symbol {symbol} outside alphabet of size {x.q}")
    return QaryString(x.symbols[x.symbols != symbol], x.q)

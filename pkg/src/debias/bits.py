"""Bit-string and Q-ary string containers plus bit-exact file I/O.

Two on-disk formats are supported:

* ``ascii``  -- the characters '0' and '1'; whitespace is ignored.
* ``packed`` -- an 8-byte little-endian bit count followed by the bits
  packed MSB-first, pad bits in the final byte zeroed.  The length prefix
  makes lengths that are not a multiple of 8 unambiguous.
"""

from __future__ import annotations

import struct
from collections.abc import Iterable

import numpy as np

from .errors import BitFormatError, ValidationError

FORMATS = ("ascii", "packed")

_ASCII_WS = frozenset(b" \t\n\r\x0b\x0c")


class BitString:
    """Growable sequence of bits with O(1) append and O(1) indexed read.

    Equality and hashing reflect the current contents; do not mutate a
    string that is being used as a set member or dict key.
    """

    __slots__ = ("_buf",)

    def __init__(self, bits: "str | Iterable[int] | BitString" = ""):
        if isinstance(bits, BitString):
            self._buf = bytearray(bits._buf)
            return
        buf = bytearray()
        if isinstance(bits, str):
            for i, ch in enumerate(bits):
                if ch == "0":
                    buf.append(0)
                elif ch == "1":
                    buf.append(1)
                else:
                    raise ValidationError(f"illegal bit character {ch!r} at position {i}")
        else:
            for i, b in enumerate(bits):
                b = int(b)
                if b not in (0, 1):
                    raise ValidationError(f"illegal bit value {b!r} at position {i}")
                buf.append(b)
        self._buf = buf

    @classmethod
    def _wrap(cls, buf: bytearray) -> "BitString":
        out = cls.__new__(cls)
        out._buf = buf
        return out

    @classmethod
    def from_array(cls, arr) -> "BitString":
        """Build from a numpy array of 0/1 values (copies)."""
        arr = np.asarray(arr)
        packed = arr.astype(np.uint8)
        if not np.array_equal(packed, arr):
            raise ValidationError("array contains non-bit values")
        if packed.size and packed.max() > 1:
            raise ValidationError("array contains non-bit values")
        return cls._wrap(bytearray(packed.tobytes()))

    @classmethod
    def from_int(cls, value: int, length: int) -> "BitString":
        """The ``length``-bit string whose MSB-first value is ``value``."""
        if value < 0 or value >= 1 << length:
            raise ValidationError(f"value {value} does not fit in {length} bits")
        return cls._wrap(bytearray((value >> (length - 1 - i)) & 1 for i in range(length)))

    def to_array(self) -> np.ndarray:
        """Contents as a fresh uint8 numpy array."""
        return np.frombuffer(bytes(self._buf), dtype=np.uint8)

    def to_int(self) -> int:
        """MSB-first integer value (lexicographic rank within its length)."""
        v = 0
        for b in self._buf:
            v = (v << 1) | b
        return v

    def to01(self) -> str:
        return self._buf.decode("latin-1").translate(str.maketrans("\x00\x01", "01"))

    def append(self, bit: int) -> None:
        if bit not in (0, 1):
            raise ValidationError(f"illegal bit value {bit!r}")
        self._buf.append(bit)

    def extend(self, bits) -> None:
        if isinstance(bits, BitString):
            self._buf.extend(bits._buf)
        else:
            for b in bits:
                self.append(int(b))

    def count(self, bit: int) -> int:
        if bit not in (0, 1):
            raise ValidationError(f"illegal bit value {bit!r}")
        return self._buf.count(bit)

    def __len__(self) -> int:
        return len(self._buf)

    def __iter__(self):
        return iter(self._buf)

    def __getitem__(self, i):
        if isinstance(i, slice):
            return BitString._wrap(bytearray(self._buf[i]))
        return self._buf[i]

    def __add__(self, other: "BitString") -> "BitString":
        if not isinstance(other, BitString):
            return NotImplemented
        return BitString._wrap(self._buf + other._buf)

    def __eq__(self, other) -> bool:
        if not isinstance(other, BitString):
            return NotImplemented
        return self._buf == other._buf

    def __hash__(self) -> int:
        return hash(bytes(self._buf))

    def __str__(self) -> str:
        return self.to01()

    def __repr__(self) -> str:
        if len(self) <= 64:
            return f"BitString({self.to01()!r})"
        return f"BitString({self.to01()[:61]!r}..., length={len(self)})"


class QaryString:
    """In-memory sequence over a Q-letter alphabet, symbols stored as codes 0..Q-1."""

    __slots__ = ("symbols", "q")

    def __init__(self, symbols, q: int):
        if q < 2:
            raise ValidationError(f"alphabet size must be >= 2, got {q}")
        arr = np.asarray(list(symbols) if not isinstance(symbols, np.ndarray) else symbols,
                         dtype=np.int64)
        if arr.size and (arr.min() < 0 or arr.max() >= q):
            raise ValidationError(f"symbol code out of range for alphabet size {q}")
        self.symbols = arr
        self.symbols.flags.writeable = False
        self.q = q

    @classmethod
    def from_letters(cls, text: str, alphabet: str) -> "QaryString":
        codes = {ch: i for i, ch in enumerate(alphabet)}
        try:
            return cls([codes[ch] for ch in text], q=len(alphabet))
        except KeyError as exc:
            raise ValidationError(f"letter {exc.args[0]!r} not in alphabet {alphabet!r}") from None

    def to_letters(self, alphabet: str) -> str:
        if len(alphabet) < self.q:
            raise ValidationError("alphabet shorter than symbol range")
        return "".join(alphabet[c] for c in self.symbols)

    def __len__(self) -> int:
        return len(self.symbols)

    def __iter__(self):
        return iter(self.symbols.tolist())

    def __getitem__(self, i):
        if isinstance(i, slice):
            return QaryString(self.symbols[i], self.q)
        return int(self.symbols[i])

    def __eq__(self, other) -> bool:
        if not isinstance(other, QaryString):
            return NotImplemented
        return self.q == other.q and np.array_equal(self.symbols, other.symbols)

    def __repr__(self) -> str:
        return f"QaryString({self.symbols.tolist()!r}, q={self.q})"


def count_bits(x: BitString, bit: int) -> int:
    """Number of occurrences of ``bit`` in ``x``."""
    return x.count(bit)


def parse_bits(data: bytes, fmt: str) -> BitString:
    """Decode ``data`` in the given format ('ascii' or 'packed') to a BitString.

    Raises BitFormatError with the offending byte offset on malformed input.
    """
    if fmt == "ascii":
        buf = bytearray()
        for off, byte in enumerate(data):
            if byte == 0x30:
                buf.append(0)
            elif byte == 0x31:
                buf.append(1)
            elif byte not in _ASCII_WS:
                raise BitFormatError(f"illegal character {chr(byte)!r}", off)
        return BitString._wrap(buf)
    if fmt == "packed":
        if len(data) < 8:
            raise BitFormatError("truncated header: need 8 length bytes", 0)
        (n,) = struct.unpack("<Q", data[:8])
        payload = data[8:]
        if n > len(payload) * 8:
            raise BitFormatError(
                f"declared bit count {n} exceeds payload capacity {len(payload) * 8}", 0)
        if n == 0:
            return BitString()
        raw = np.frombuffer(payload[: (n + 7) // 8], dtype=np.uint8)
        bits = np.unpackbits(raw, count=n, bitorder="big")
        return BitString.from_array(bits)
    raise ValidationError(f"unknown format {fmt!r}; expected one of {FORMATS}")


def serialize_bits(x: BitString, fmt: str) -> bytes:
    """Encode ``x`` in the given format; inverse of :func:`parse_bits`."""
    if fmt == "ascii":
        return x.to01().encode("ascii")
    if fmt == "packed":
        header = struct.pack("<Q", len(x))
        if len(x) == 0:
            return header
        return header + np.packbits(x.to_array(), bitorder="big").tobytes()
    raise ValidationError(f"unknown format {fmt!r}; expected one of {FORMATS}")

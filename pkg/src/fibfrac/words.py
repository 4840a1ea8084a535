"""i-Fibonacci words: generation, substitution, and structural decompositions.

The family is indexed by i >= 2 with f_1 = "0", f_2 = 0^(i-1) 1 and
f_n = f_{n-1} f_{n-2}.  Symbols are stored bit-packed so that orders with
tens of millions of symbols stay affordable.
"""

from __future__ import annotations

import struct
from collections import namedtuple
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, StructureError

_INT64_MAX = 2**63 - 1


def _check_index(i: int, n: int) -> None:
    if i < 2:
        raise DomainError("family index i must be >= 2, got %r" % (i,))
    if n < 1:
        raise DomainError("order n must be >= 1, got %r" % (n,))


def fib_length(i: int, n: int) -> int:
    """Length of f_n^[i] via L(1) = 1, L(2) = i, L(n) = L(n-1) + L(n-2).

    Raises OverflowError once the length no longer fits in a signed 64-bit
    integer, rather than wrapping around.
    """
    _check_index(i, n)
    a, b = 1, int(i)
    for _ in range(n - 2):
        a, b = b, a + b
    length = a if n == 1 else b
    if length > _INT64_MAX:
        raise OverflowError("|f_%d^[%d]| = %d exceeds int64" % (n, i, length))
    return length


@dataclass(frozen=True, eq=False)
class Word:
    """A finite binary word f_n^[i], stored bit-packed LSB-first.

    Equality compares symbol content only, so words built by different
    routes compare equal when they spell the same string.
    """

    i: int
    n: int
    packed: np.ndarray
    length: int

    def bits(self) -> np.ndarray:
        """Symbols as a fresh uint8 array of 0s and 1s."""
        return np.unpackbits(self.packed, count=self.length, bitorder="little")

    def text(self) -> str:
        """Symbols as a '0'/'1' string (no trailing newline)."""
        return (self.bits() + np.uint8(ord("0"))).tobytes().decode("ascii")

    def __len__(self) -> int:
        return self.length

    def __eq__(self, other):
        if isinstance(other, Word):
            return self.length == other.length and np.array_equal(
                self.packed, other.packed
            )
        return NotImplemented

    def __hash__(self):
        return hash((self.length, self.packed.tobytes()))

    def __repr__(self):
        head = self.text() if self.length <= 40 else self.text()[:37] + "..."
        return "Word(i=%d, n=%d, %r, length=%d)" % (self.i, self.n, head, self.length)


def _word_from_bits(i: int, n: int, bits: np.ndarray) -> Word:
    packed = np.packbits(bits, bitorder="little")
    return Word(i=i, n=n, packed=packed, length=int(bits.size))


def as_bits(w) -> np.ndarray:
    """Coerce a Word, '0'/'1' string or bytes, or 0/1 sequence to a uint8 array."""
    if isinstance(w, Word):
        return w.bits()
    if isinstance(w, str):
        w = w.encode("ascii")
    if isinstance(w, (bytes, bytearray)):
        arr = np.frombuffer(bytes(w), dtype=np.uint8) - np.uint8(ord("0"))
    else:
        arr = np.asarray(w, dtype=np.uint8)
    if arr.ndim != 1:
        raise DomainError("symbol sequence must be one-dimensional")
    if arr.size and int(arr.max(initial=0)) > 1:
        raise DomainError("symbols must be 0 or 1")
    return arr


def word_concat(i: int, n: int) -> Word:
    """Build f_n^[i] bottom-up by the concatenation rule f_n = f_{n-1} f_{n-2}."""
    fib_length(i, n)  # domain and overflow checks
    a = np.zeros(1, dtype=np.uint8)
    if n == 1:
        return _word_from_bits(i, n, a)
    b = np.zeros(i, dtype=np.uint8)
    b[-1] = 1
    for _ in range(n - 2):
        a, b = b, np.concatenate((b, a))
    return _word_from_bits(i, n, b)


@dataclass(frozen=True)
class BlockSeq:
    """A word written as blocks, tag 0 for B0 = "0" and tag 1 for B1 = 0^(i-1) 1."""

    i: int
    blocks: np.ndarray


def substitute(b: BlockSeq) -> BlockSeq:
    """One application of the substitution at block level: B0 -> B1, B1 -> B1 B0."""
    tags = np.asarray(b.blocks, dtype=np.uint8)
    counts = (1 + tags).astype(np.int64)
    out = np.zeros(int(counts.sum()), dtype=np.uint8)
    starts = np.zeros(tags.size, dtype=np.int64)
    np.cumsum(counts[:-1], out=starts[1:])
    out[starts] = 1
    return BlockSeq(i=b.i, blocks=out)


def flatten_blocks(b: BlockSeq) -> np.ndarray:
    """Expand block tags to symbols: B0 -> "0", B1 -> 0^(i-1) 1."""
    tags = np.asarray(b.blocks, dtype=np.uint8)
    counts = np.where(tags == 0, 1, b.i).astype(np.int64)
    ends = np.cumsum(counts)
    out = np.zeros(int(ends[-1]) if ends.size else 0, dtype=np.uint8)
    out[ends[tags == 1] - 1] = 1
    return out


def word_by_substitution(i: int, n: int) -> Word:
    """Build f_n^[i] by applying the substitution n-1 times to f_1 = "0"."""
    length = fib_length(i, n)
    b = BlockSeq(i=i, blocks=np.zeros(1, dtype=np.uint8))
    for _ in range(n - 1):
        b = substitute(b)
    bits = flatten_blocks(b)
    if bits.size != length:
        raise StructureError(
            "substitution gave %d symbols, expected %d" % (bits.size, length)
        )
    return _word_from_bits(i, n, bits)


def two_adic_distance(w, v) -> float:
    """2^(-L) where L is the longest common prefix length; 0 for identical words."""
    a, b = as_bits(w), as_bits(v)
    m = min(a.size, b.size)
    neq = a[:m] != b[:m]
    if neq.any():
        length = int(np.argmax(neq))
    elif a.size == b.size:
        return 0.0
    else:
        length = m
    return float(2.0 ** (-length))


def l_word_bits(i: int, n: int) -> np.ndarray:
    """Symbols of l_n^[i]: f_n with its last two symbols swapped."""
    if n < 2:
        raise DomainError("l-words need n >= 2, got n=%d" % n)
    bits = word_concat(i, n).bits()
    bits[-2], bits[-1] = bits[-1], bits[-2]
    return bits


def last_two(n: int) -> str:
    """Last two symbols of f_n^[i] for n >= 2: "01" when n is even, else "10".

    This follows from f_n ending in f_{n-2} (in the suffix sense) for every
    family index i, so the tag depends only on the parity of n.
    """
    if n < 2:
        raise DomainError("words of length >= 2 need n >= 2, got n=%d" % n)
    return "01" if n % 2 == 0 else "10"


@dataclass(frozen=True)
class FivePartite:
    """f_n = f_{n-3} f_{n-3} f_{n-6} l_{n-3} l_{n-3} as index ranges into the word."""

    word: Word
    parts: tuple
    kinds: tuple


def five_partite(i: int, n: int) -> FivePartite:
    """Split f_n (n >= 7) into f_{n-3} f_{n-3} f_{n-6} l_{n-3} l_{n-3}.

    The returned ranges are verified against independently generated parts;
    a mismatch raises StructureError.
    """
    _check_index(i, n)
    if n < 7:
        raise DomainError("five-partite structure needs n >= 7, got n=%d" % n)
    w = word_concat(i, n)
    len3 = fib_length(i, n - 3)
    len6 = fib_length(i, n - 6)
    cuts = (0, len3, 2 * len3, 2 * len3 + len6, 3 * len3 + len6, 4 * len3 + len6)
    if cuts[-1] != len(w):
        raise StructureError("part lengths do not add up for (i=%d, n=%d)" % (i, n))
    bits = w.bits()
    f3 = word_concat(i, n - 3).bits()
    f6 = word_concat(i, n - 6).bits()
    l3 = f3.copy()
    l3[-2], l3[-1] = l3[-1], l3[-2]
    expected = (f3, f3, f6, l3, l3)
    parts = tuple((cuts[k], cuts[k + 1]) for k in range(5))
    kinds = (("f", n - 3), ("f", n - 3), ("f", n - 6), ("l", n - 3), ("l", n - 3))
    for (start, end), ref in zip(parts, expected):
        if not np.array_equal(bits[start:end], ref):
            raise StructureError(
                "part [%d:%d] of f_%d^[%d] does not match its expected word"
                % (start, end, n, i)
            )
    return FivePartite(word=w, parts=parts, kinds=kinds)


PalindromeSplit = namedtuple("PalindromeSplit", ["p", "ab"])


def palindrome_decomposition(w) -> PalindromeSplit:
    """Split a word as p * ab where p is a palindrome and ab is "01" or "10"."""
    bits = as_bits(w)
    if bits.size < 2:
        raise DomainError("need at least two symbols, got %d" % bits.size)
    p, tail = bits[:-2], bits[-2:]
    if tail[0] == tail[1]:
        raise StructureError(
            "last two symbols are %d%d, expected 01 or 10" % (tail[0], tail[1])
        )
    if not np.array_equal(p, p[::-1]):
        raise StructureError("leading part is not a palindrome")
    ab = "01" if tail[1] == 1 else "10"
    return PalindromeSplit(p=p, ab=ab)


def contains_11(w) -> bool:
    """True iff "11" occurs as a factor."""
    bits = as_bits(w)
    if bits.size < 2:
        return False
    return bool(np.any(bits[1:] & bits[:-1]))


def to_text(w: Word) -> bytes:
    """Serialize to ASCII '0'/'1' with a trailing newline."""
    return (w.bits() + np.uint8(ord("0"))).tobytes() + b"\n"


def from_text(data: bytes, i: int = 2, n: int = 1) -> Word:
    """Parse the text serialization back into a Word tagged (i, n)."""
    body = data[:-1] if data.endswith(b"\n") else data
    bits = as_bits(body)
    return _word_from_bits(i, n, bits)


def to_binary(w: Word) -> bytes:
    """Serialize to 8-byte little-endian length followed by LSB-first packed bits."""
    return struct.pack("<Q", w.length) + w.packed.tobytes()


def from_binary(data: bytes, i: int = 2, n: int = 1) -> Word:
    """Parse the binary serialization back into a Word tagged (i, n)."""
    if len(data) < 8:
        raise DomainError("binary word data shorter than its 8-byte header")
    (length,) = struct.unpack("<Q", data[:8])
    nbytes = (length + 7) // 8
    if len(data) - 8 != nbytes:
        raise DomainError(
            "expected %d packed bytes for %d symbols, got %d"
            % (nbytes, length, len(data) - 8)
        )
    packed = np.frombuffer(data[8:], dtype=np.uint8)
    return Word(i=i, n=n, packed=packed.copy(), length=int(length))

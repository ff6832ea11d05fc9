"""Resumable digit and bit streams with word-boundary metadata.

Every stream walks an ordering word by word and emits the words' digits (or
path-code bits) one at a time, keeping track of which word the current digit
belongs to and where inside the word it sits.  A checkpoint is the triple
(major, minor, offset) = (level, position-in-level, offset-in-word) - for the
denominator enumeration, (denominator, numerator-1, offset) - and is
serialized as three decimal integers on separate lines, so a long run can be
resumed exactly where it stopped.

Two binary dump formats are provided: CF digits as unsigned LEB128, and bit
streams packed eight bits per byte, most significant bit first (the tail byte
is zero-padded).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator

from .cfcore import Word
from .trees import OrderingId, iter_ordering_from, start_position

STREAM_KINDS = ("kepler", "farey", "aks", "kepler-perm", "champernowne")


@dataclass(frozen=True)
class Checkpoint:
    major: int
    minor: int
    offset: int

    def to_text(self) -> str:
        return f"{self.major}\n{self.minor}\n{self.offset}\n"

    @classmethod
    def from_text(cls, text: str) -> "Checkpoint":
        try:
            major, minor, offset = (int(line) for line in text.split())
        except ValueError:
            raise ValueError(f"malformed checkpoint: {text!r}") from None
        return cls(major, minor, offset)


def _champernowne_words(major: int, minor: int) -> Iterator[tuple[int, int, Word]]:
    # the level-l "words" are the 2**l path codes themselves, as bit tuples
    for l in itertools.count(major):
        for pos in range(minor, 1 << l):
            yield l, pos, tuple(pos >> shift & 1 for shift in range(l - 1, -1, -1))
        minor = 0


class DigitStream:
    """Single-consumer iterator over the digits of one ordering.

    Attributes word_index (1-based, counting from the very start of the
    ordering), offset_in_word (0-based) and last_in_word describe the digit
    most recently returned; position counts digits emitted since this
    instance was created or resumed.
    """

    def __init__(self, kind: str, seed: int | None = None,
                 checkpoint: Checkpoint | None = None):
        if kind not in STREAM_KINDS:
            raise ValueError(f"unknown stream kind {kind!r}, expected one of {STREAM_KINDS}")
        self.kind = kind
        self.seed = seed
        major, minor = start_position(kind)
        offset = 0
        if checkpoint is not None:
            major, minor, offset = checkpoint.major, checkpoint.minor, checkpoint.offset
            if offset < 0:
                raise ValueError("checkpoint offset must be >= 0")
        if kind == "champernowne":
            if seed is not None:
                raise ValueError("champernowne stream takes no seed")
            self._source = _champernowne_words(major, minor)
        else:
            self._source = iter_ordering_from(self.ordering, major, minor)
        self._major = major
        self._minor = minor
        self._offset = offset  # digits of the current word already emitted
        self._word: Word = ()
        self._pulled = False
        self._word_mode = False
        self.position = 0
        self.word_index = 0
        self.offset_in_word = -1
        self.last_in_word = False

    @property
    def ordering(self) -> OrderingId | None:
        if self.kind == "champernowne":
            return None
        seed = self.seed if self.kind == "kepler-perm" else None
        return OrderingId(self.kind, seed)

    @property
    def is_fresh(self) -> bool:
        """True while nothing has been consumed and no resume offset is pending."""
        return not self._pulled and self._offset == 0 and not self._word_mode

    def _abs_word_index(self) -> int:
        if self.kind == "aks":
            return (self._major - 1) * (self._major - 2) // 2 + self._minor + 1
        return (1 << self._major) + self._minor

    def __iter__(self) -> "DigitStream":
        return self

    def __next__(self) -> int:
        if self._word_mode:
            raise RuntimeError("stream already consumed word-wise")
        while self._offset >= len(self._word) or not self._pulled:
            skip = 0 if self._pulled else self._offset
            self._major, self._minor, self._word = next(self._source)
            self._pulled = True
            if skip > len(self._word):
                raise ValueError(f"checkpoint offset {skip} exceeds word length {len(self._word)}")
            self._offset = skip
        digit = self._word[self._offset]
        self._offset += 1
        self.position += 1
        self.word_index = self._abs_word_index()
        self.offset_in_word = self._offset - 1
        self.last_in_word = self._offset == len(self._word)
        return digit

    def take(self, n: int) -> list[int]:
        return [next(self) for _ in range(n)]

    def checkpoint(self) -> Checkpoint:
        """State of the next digit to be emitted."""
        return Checkpoint(self._major, self._minor, self._offset)

    def words(self) -> Iterator[Word]:
        """Consume the rest of the stream word by word (fresh streams only)."""
        if self._pulled or self._offset:
            raise RuntimeError("words() requires a stream at a word boundary with nothing consumed")
        self._word_mode = True
        return (w for _, _, w in self._source)


def kepler_stream(checkpoint: Checkpoint | None = None) -> DigitStream:
    """CF digits of all reduced words, level by level in path-code order."""
    return DigitStream("kepler", checkpoint=checkpoint)

def farey_stream(checkpoint: Checkpoint | None = None) -> DigitStream:
    """CF digits of the mediant-style tree, level by level."""
    return DigitStream("farey", checkpoint=checkpoint)

def aks_stream(checkpoint: Checkpoint | None = None) -> DigitStream:
    """CF digits of all fractions p/n by denominator, reduced, duplicates kept."""
    return DigitStream("aks", checkpoint=checkpoint)

def kepler_perm_stream(seed: int, checkpoint: Checkpoint | None = None) -> DigitStream:
    """Kepler digits with each level's words shuffled by the seeded PRNG."""
    return DigitStream("kepler-perm", seed=seed, checkpoint=checkpoint)

def champernowne_bits(checkpoint: Checkpoint | None = None) -> DigitStream:
    """All binary words in counting order: 0 1 00 01 10 11 000 ..."""
    return DigitStream("champernowne", checkpoint=checkpoint)


def stream_for(order: OrderingId, checkpoint: Checkpoint | None = None) -> DigitStream:
    return DigitStream(order.kind, seed=order.seed, checkpoint=checkpoint)


def stream_to_real(stream: DigitStream, m: int) -> tuple[Fraction, Fraction]:
    """Interval spanned by the m-th and (m+1)-th convergents of the stream.

    Consecutive convergents straddle every continuation of the expansion, so
    the stream's limit value lies inside; the width is 1/(q_m * q_(m+1)).
    """
    if m < 1:
        raise ValueError("need at least one digit")
    if stream.kind == "champernowne":
        raise ValueError("bit streams have no continued-fraction value")
    p_prev, q_prev, p, q = 1, 0, 0, 1
    last = Fraction(0)
    for _ in range(m + 1):
        a = next(stream)
        p_prev, q_prev, p, q = p, q, a * p + p_prev, a * q + q_prev
        last, prev = Fraction(p, q), last
    return (prev, last) if prev < last else (last, prev)


def leb128_encode(value: int) -> bytes:
    """Unsigned LEB128: 7 value bits per byte, high bit flags continuation."""
    if value < 0:
        raise ValueError("LEB128 here is unsigned")
    out = bytearray()
    while True:
        byte = value & 0x7F
        value >>= 7
        out.append(byte | 0x80 if value else byte)
        if not value:
            return bytes(out)


def leb128_decode(data: bytes) -> list[int]:
    """Decode a byte string of concatenated unsigned LEB128 values."""
    values = []
    acc = 0
    shift = 0
    for byte in data:
        acc |= (byte & 0x7F) << shift
        if byte & 0x80:
            shift += 7
        else:
            values.append(acc)
            acc = 0
            shift = 0
    if shift:
        raise ValueError("truncated LEB128 sequence")
    return values


def pack_bits(bits) -> bytes:
    """Pack an iterable of 0/1 into bytes, MSB first, zero-padded at the end."""
    out = bytearray()
    acc = 0
    have = 0
    for b in bits:
        if b not in (0, 1):
            raise ValueError(f"bits must be 0 or 1, got {b!r}")
        acc = acc << 1 | b
        have += 1
        if have == 8:
            out.append(acc)
            acc = 0
            have = 0
    if have:
        out.append(acc << (8 - have))
    return bytes(out)


def unpack_bits(data: bytes, n_bits: int) -> list[int]:
    if n_bits > 8 * len(data):
        raise ValueError("fewer bits in data than requested")
    return [data[i >> 3] >> (7 - (i & 7)) & 1 for i in range(n_bits)]

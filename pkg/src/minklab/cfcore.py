"""Exact continued fractions, binary path codes, and dyadic rationals.

A rational x in (0, 1) is written x = 1/(a1 + 1/(a2 + ...)) with positive
integer digits; we store the digit tuple (a1, ..., an).  Every rational has
exactly two finite expansions, differing only in the tail ((..., a) versus
(..., a-1, 1)); the reduced form, with last digit >= 2, is the canonical one
and the only one accepted here.

A word of digit sum s+2 also has a binary path code of length s: the code
0^(an-2) 1 0^(a(n-1)-1) 1 ... 1 0^(a1-1).  Codes are exchanged either as
ASCII '0'/'1' strings or as an (integer, bit-length) pair.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

Word = tuple[int, ...]

# enumeration guard: 2**40 words per level is past any feasible run
LEVEL_BUDGET = 40


def check_block(d, allow_empty: bool = False) -> tuple[int, ...]:
    """Validate a digit block (any positive digits, no reduced-form rule)."""
    block = tuple(d)
    if not block and not allow_empty:
        raise ValueError("block must have at least one digit")
    for a in block:
        if not isinstance(a, int) or isinstance(a, bool) or a < 1:
            raise ValueError(f"block digits must be positive integers, got {a!r}")
    return block


def check_word(w) -> Word:
    """Validate a digit tuple and return it as a canonical tuple."""
    word = check_block(w)
    if word[-1] < 2:
        raise ValueError(f"not in reduced form (last digit must be >= 2): {word}")
    return word


def digit_sum(w) -> int:
    return sum(check_word(w))


def word_level(w) -> int:
    """Level of the word in the full binary tree of reduced words."""
    return digit_sum(w) - 2


def rational_to_cf(r) -> Word:
    """Reduced continued-fraction digits of a rational in (0, 1)."""
    r = Fraction(r)
    if not 0 < r < 1:
        raise ValueError(f"rational must lie strictly between 0 and 1: {r}")
    p, q = r.numerator, r.denominator
    digits = []
    while p:
        a, rem = divmod(q, p)
        digits.append(a)
        p, q = rem, p
    return tuple(digits)


def cf_to_rational(w) -> Fraction:
    """Exact value of a reduced digit tuple."""
    w = check_word(w)
    p, q = 1, w[-1]
    for a in w[-2::-1]:
        p, q = q, a * q + p
    return Fraction(p, q)


def cf_to_code(w) -> str:
    """Binary path code of a word, as an ASCII '0'/'1' string."""
    w = check_word(w)
    parts = ["0" * (w[-1] - 2)]
    for a in w[-2::-1]:
        parts.append("1")
        parts.append("0" * (a - 1))
    return "".join(parts)


def code_to_cf(code: str) -> Word:
    """Inverse of cf_to_code: the word whose path code is the given string."""
    if code.strip("01"):
        raise ValueError(f"path code must consist of '0'/'1' only: {code!r}")
    return code_int_to_cf(int(code, 2) if code else 0, len(code))


def code_int_to_cf(pos: int, length: int) -> Word:
    """Word whose path code is `pos` written as `length` binary bits.

    Reading the code left to right from the root word (2,), a 0 bumps the
    first digit and a 1 prepends a fresh digit 1; this closed form peels
    zero-runs off the low end instead, which is equivalent and O(n).
    """
    if length < 0 or not 0 <= pos < (1 << length):
        raise ValueError(f"code position {pos} does not fit in {length} bits")
    if pos == 0:
        return (length + 2,)
    digits = []
    consumed = 0
    v = pos
    while v:
        run = (v & -v).bit_length() - 1
        digits.append(run + 1)
        v >>= run + 1
        consumed += run + 1
    digits.append(length - consumed + 2)
    return tuple(digits)


def cf_to_code_int(w) -> tuple[int, int]:
    """Path code of a word as an (integer value, bit length) pair."""
    w = check_word(w)
    v = 0
    for a in w[-2::-1]:
        v = ((v << 1) | 1) << (a - 1)
    return v, sum(w) - 2


def format_block(d) -> str:
    return ",".join(str(a) for a in check_block(d))


def format_cf(w) -> str:
    return ",".join(str(a) for a in check_word(w))


def parse_cf(text: str) -> Word:
    """Parse the textual form 'a1,a2,...,an'."""
    try:
        digits = tuple(int(t) for t in text.split(","))
    except ValueError:
        raise ValueError(f"malformed digit list: {text!r}") from None
    return check_word(digits)


def format_rational(r: Fraction) -> str:
    return f"{r.numerator}/{r.denominator}"


def parse_rational(text: str) -> Fraction:
    """Parse 'p/q' into an exact fraction."""
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise ValueError(f"malformed rational: {text!r}") from None


@dataclass(frozen=True)
class Dyadic:
    """Exact dyadic rational num / 2**exp, kept with num odd or zero."""

    num: int
    exp: int

    def __post_init__(self):
        if self.exp < 0:
            raise ValueError("exponent must be >= 0")
        num, exp = self.num, self.exp
        while num and num % 2 == 0 and exp > 0:
            num //= 2
            exp -= 1
        if not num:
            exp = 0
        object.__setattr__(self, "num", num)
        object.__setattr__(self, "exp", exp)

    def as_fraction(self) -> Fraction:
        return Fraction(self.num, 1 << self.exp)

    def halved(self) -> "Dyadic":
        return Dyadic(self.num, self.exp + 1)

    def __float__(self) -> float:
        return self.num / (1 << self.exp)

    def __str__(self) -> str:
        return f"{self.num}/2^{self.exp}"

    def decimal(self) -> str:
        """Exact finite decimal expansion (num * 5^exp shifted exp places)."""
        if self.exp == 0:
            return str(self.num)
        sign = "-" if self.num < 0 else ""
        scaled = str(abs(self.num) * 5 ** self.exp).rjust(self.exp + 1, "0")
        return f"{sign}{scaled[:-self.exp]}.{scaled[-self.exp:]}"

    def _cmp_key(self, other: "Dyadic") -> tuple[int, int]:
        e = max(self.exp, other.exp)
        return self.num << (e - self.exp), other.num << (e - other.exp)

    def __lt__(self, other):
        a, b = self._cmp_key(other)
        return a < b

    def __le__(self, other):
        a, b = self._cmp_key(other)
        return a <= b

"""Orderings of the reduced rationals in (0, 1).

Three tree-free descriptions of the same binary tree are kept deliberately
independent so they can cross-check each other:

* the child rule p/q -> (p/(p+q), q/(p+q)),
* path-code counting (level l holds the 2**l codes in binary counting order),
* the closed-form word of index n read off the binary expansion of n.

A second tree with the same level sets but a different child rule (the
mediant-style rule switching on word length parity) and the enumeration of
all fractions p/n by denominator round out the orderings.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator

from .cfcore import (
    LEVEL_BUDGET,
    Word,
    cf_to_code_int,
    check_word,
    code_int_to_cf,
)
from .prng import fisher_yates_permutation

ORDERING_KINDS = ("kepler", "farey", "aks", "kepler-perm")

# exhaustive composition enumeration above this digit sum is not worth the CPU
COMPOSITION_BUDGET = 26


@dataclass(frozen=True)
class OrderingId:
    """Identifier of an ordering of the rationals; seed only for kepler-perm."""

    kind: str
    seed: int | None = None

    def __post_init__(self):
        if self.kind not in ORDERING_KINDS:
            raise ValueError(f"unknown ordering {self.kind!r}, expected one of {ORDERING_KINDS}")
        if (self.kind == "kepler-perm") != (self.seed is not None):
            raise ValueError("seed must be given for kepler-perm and only for it")


def ordering(kind: str, seed: int | None = None) -> OrderingId:
    return OrderingId(kind, seed)


def kepler_children(w) -> tuple[Word, Word]:
    """Children of a word: bump the first digit, or prepend a digit 1."""
    w = check_word(w)
    return (w[0] + 1,) + w[1:], (1,) + w


def kepler_level(l: int) -> Iterator[Word]:
    """All 2**l words of level l in path-code counting order (streaming)."""
    if not 0 <= l <= LEVEL_BUDGET:
        raise ValueError(f"level {l} outside budget 0..{LEVEL_BUDGET}")
    return (code_int_to_cf(pos, l) for pos in range(1 << l))


def kepler_level_children(l: int) -> list[Word]:
    """Level l materialized by repeated application of the child rule.

    Cross-check enumeration: independent of path codes.
    """
    if not 0 <= l <= LEVEL_BUDGET:
        raise ValueError(f"level {l} outside budget 0..{LEVEL_BUDGET}")
    level = [(2,)]
    for _ in range(l):
        nxt = []
        for w in level:
            a, b = kepler_children(w)
            nxt.append(a)
            nxt.append(b)
        level = nxt
    return level


def q_of_n(n: int) -> Word:
    """Word at 1-based position n of the level-by-level enumeration.

    Closed form from the binary expansion n = 2**e1 + ... + 2**ek with
    e1 < ... < ek: digits (e1+1, e2-e1, ..., ek-e(k-1)) with 1 added to the
    last digit.
    """
    if n < 1:
        raise ValueError("position must be >= 1")
    exps = [i for i in range(n.bit_length()) if n >> i & 1]
    digits = [exps[0] + 1]
    digits.extend(b - a for a, b in itertools.pairwise(exps))
    digits[-1] += 1
    return tuple(digits)


def kepler_index(w) -> int:
    """1-based position of a word in the level-by-level enumeration."""
    pos, length = cf_to_code_int(w)
    return (1 << length) + pos


def farey_children(w) -> tuple[Word, Word]:
    """Children in the mediant-style tree; rule switches on word length parity."""
    w = check_word(w)
    bigger = w[:-1] + (w[-1] + 1,)
    split = w[:-1] + (w[-1] - 1, 2)
    return (bigger, split) if len(w) % 2 else (split, bigger)


def farey_word(l: int, pos: int) -> Word:
    """Word reached from the root by the farey moves spelled by pos as l bits."""
    if not 0 <= pos < (1 << l):
        raise ValueError(f"position {pos} does not fit in {l} bits")
    w: Word = (2,)
    for shift in range(l - 1, -1, -1):
        w = farey_children(w)[pos >> shift & 1]
    return w


def farey_level(l: int) -> Iterator[Word]:
    """All 2**l words of level l of the mediant-style tree, left to right."""
    if not 0 <= l <= LEVEL_BUDGET:
        raise ValueError(f"level {l} outside budget 0..{LEVEL_BUDGET}")
    return (farey_word(l, pos) for pos in range(1 << l))


def aks_sequence(max_den: int) -> Iterator[Fraction]:
    """All fractions p/n for n = 2..max_den, p = 1..n-1, reduced to lowest
    terms with duplicate values kept as separate occurrences."""
    if max_den < 2:
        raise ValueError("max_den must be >= 2")
    return (Fraction(p, n) for n in range(2, max_den + 1) for p in range(1, n))


def count_words_with_sum(s: int) -> int:
    """Number of reduced words of digit sum s, by exhaustive enumeration.

    Walks every composition of s whose last part is >= 2 (one stack entry per
    composition prefix), so it is an oracle independent of any tree.
    """
    if s < 2:
        raise ValueError("digit sum must be >= 2")
    if s > COMPOSITION_BUDGET:
        raise ValueError(f"digit sum {s} above enumeration budget {COMPOSITION_BUDGET}")
    total = 0
    stack = [s]
    while stack:
        rem = stack.pop()
        if rem >= 2:
            total += 1  # close the word with last digit = rem
        stack.extend(range(1, rem))  # remainders after a first digit 1..rem-1
    return total


def level_digit_count(l: int) -> int:
    """Total number of CF digits over the 2**l words of level l."""
    if l < 0:
        raise ValueError("level must be >= 0")
    return 1 if l == 0 else (l + 2) << (l - 1)


def cumulative_digit_count(levels: int) -> int:
    """CF digits in the first `levels` complete levels (0..levels-1)."""
    if levels < 0:
        raise ValueError("levels must be >= 0")
    return levels << (levels - 1) if levels else 0


def level_bit_count(l: int) -> int:
    """Path-code bits over level l (each of the 2**l codes has l bits)."""
    if l < 0:
        raise ValueError("level must be >= 0")
    return l << l


def cumulative_bit_count(levels: int) -> int:
    """Path-code bits in the first `levels` complete levels (0..levels-1)."""
    if levels < 0:
        raise ValueError("levels must be >= 0")
    # sum of l * 2**l for l < levels
    return (levels - 2) * (1 << levels) + 2 if levels else 0


def start_position(kind: str) -> tuple[int, int]:
    """(major, minor) of the first word: level/position, or denominator/index."""
    return (2, 0) if kind == "aks" else (0, 0)


def iter_ordering_from(order: OrderingId, major: int, minor: int) -> Iterator[tuple[int, int, Word]]:
    """Words of an ordering from resume point (major, minor), with positions.

    major/minor are (level, position-in-level) for the tree orders and
    (denominator, numerator-1) for aks.  Memory is O(1) per word except for
    kepler-perm, which materializes one level's permutation at a time.
    """
    kind = order.kind
    if kind == "kepler":
        for l in itertools.count(major):
            for pos in range(minor, 1 << l):
                yield l, pos, code_int_to_cf(pos, l)
            minor = 0
    elif kind == "kepler-perm":
        for l in itertools.count(major):
            perm = fisher_yates_permutation(1 << l, order.seed ^ l)
            for i in range(minor, 1 << l):
                yield l, i, code_int_to_cf(perm[i], l)
            minor = 0
    elif kind == "farey":
        for l in itertools.count(major):
            for pos in range(minor, 1 << l):
                yield l, pos, farey_word(l, pos)
            minor = 0
    elif kind == "aks":
        for den in itertools.count(max(major, 2)):
            for p in range(minor + 1, den):
                f = Fraction(p, den)
                # inline Euclid on the reduced fraction
                num, d = f.numerator, f.denominator
                digits = []
                while num:
                    a, rem = divmod(d, num)
                    digits.append(a)
                    num, d = rem, num
                yield den, p - 1, tuple(digits)
            minor = 0
    else:  # pragma: no cover - OrderingId validates kind
        raise ValueError(f"unknown ordering kind {kind!r}")


def iter_ordering(order: OrderingId) -> Iterator[Word]:
    """Words of an ordering from its start."""
    return (w for _, _, w in iter_ordering_from(order, *start_position(order.kind)))


def iter_rationals(order: OrderingId) -> Iterator[Fraction]:
    """Rational values of an ordering, in order."""
    from .cfcore import cf_to_rational

    return (cf_to_rational(w) for w in iter_ordering(order))

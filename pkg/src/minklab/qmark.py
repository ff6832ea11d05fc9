"""The question-mark homeomorphism and the two measures used as targets.

For x = (a1, a2, ...) the function is 2 * sum_i (-1)^(i+1) * 2^-(a1+...+ai);
on rationals the sum is finite and the value is exactly dyadic, with
denominator exponent digit_sum - 1.  The image measure of Lebesgue under the
inverse assigns a cylinder (the set of reals whose expansion starts with a
digit block d) mass 2^-sum(d); the Gauss measure of the same cylinder is
log2((1+hi)/(1+lo)) over its interval.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable

from .cfcore import Dyadic, check_block, check_word, rational_to_cf


def qmark_cf(w) -> Dyadic:
    """Exact value of the function on the rational with digits w."""
    w = check_word(w)
    total = sum(w)
    num = 0
    prefix = 0
    for i, a in enumerate(w):
        prefix += a
        term = 1 << (total - prefix + 1)
        num += term if i % 2 == 0 else -term
    return Dyadic(num, total)


def qmark_rational(r) -> Dyadic:
    """Exact value on a rational in (0, 1)."""
    return qmark_cf(rational_to_cf(r))


def qmark_real(digits: Iterable[int], tol: float = 1e-12) -> float:
    """Value from a digit stream, truncated once the next term is below tol.

    The series alternates with strictly shrinking terms, so the remainder is
    bounded by the first omitted term.  A finite stream that runs out first
    yields the exact (rational) value instead.
    """
    if not tol > 0:
        raise ValueError("tol must be positive")
    total = 0.0
    prefix = 0
    sign = 1.0
    for a in digits:
        if not isinstance(a, int) or a < 1:
            raise ValueError(f"digits must be positive integers, got {a!r}")
        prefix += a
        term = math.ldexp(2.0, -prefix)
        if term < tol:
            break
        total += sign * term
        sign = -sign
    return total


def cylinder_qmark(d) -> Dyadic:
    """Mass 2^-sum(d) of the cylinder of expansions starting with block d."""
    block = check_block(d)
    return Dyadic(1, sum(block))


@dataclass(frozen=True)
class Interval:
    """Cylinder interval; flags record which endpoint the block's own value is.

    Both target measures are atomless, so consumers may ignore the flags.
    """

    lo: Fraction
    hi: Fraction
    closed_lo: bool
    closed_hi: bool

    def width(self) -> Fraction:
        return self.hi - self.lo


def cylinder_interval(d) -> Interval:
    """Interval of reals whose expansion starts with block d.

    Endpoints are the block's own convergent p_k/q_k and the mediant
    (p_k+p_(k-1))/(q_k+q_(k-1)); which one is the upper end alternates with
    the block length.  The empty block gives [0, 1).
    """
    block = check_block(d, allow_empty=True)
    if not block:
        return Interval(Fraction(0), Fraction(1), True, False)
    p_prev, q_prev, p, q = 1, 0, 0, 1
    for a in block:
        p_prev, q_prev, p, q = p, q, a * p + p_prev, a * q + q_prev
    own = Fraction(p, q)
    mediant = Fraction(p + p_prev, q + q_prev)
    if len(block) % 2:  # odd length: convergent sits above the mediant
        return Interval(mediant, own, False, True)
    return Interval(own, mediant, True, False)


def cylinder_gauss(d) -> float:
    """Gauss measure log2((1+hi)/(1+lo)) of the cylinder of block d."""
    iv = cylinder_interval(d)
    return math.log2(float((1 + iv.hi) / (1 + iv.lo)))


def gauss_partial_sum(max_digit: int) -> float:
    """Gauss mass of the first digit being <= max_digit (tends to 1)."""
    if max_digit < 1:
        raise ValueError("max_digit must be >= 1")
    # telescoped: sum_{a<=A} log2((a+1)^2 / (a(a+2))) = log2(2(A+1)/(A+2))
    return math.log2(2 * (max_digit + 1) / (max_digit + 2))

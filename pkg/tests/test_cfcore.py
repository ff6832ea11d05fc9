import math
from fractions import Fraction

import pytest

from minklab import (
    Dyadic,
    cf_to_code,
    cf_to_code_int,
    cf_to_rational,
    check_block,
    check_word,
    code_int_to_cf,
    code_to_cf,
    digit_sum,
    format_block,
    format_cf,
    format_rational,
    parse_cf,
    parse_rational,
    rational_to_cf,
    word_level,
)

EXPANSIONS = [
    (Fraction(1, 2), (2,)),
    (Fraction(1, 3), (3,)),
    (Fraction(2, 3), (1, 2)),
    (Fraction(1, 4), (4,)),
    (Fraction(3, 4), (1, 3)),
    (Fraction(2, 5), (2, 2)),
    (Fraction(3, 5), (1, 1, 2)),
    (Fraction(3, 7), (2, 3)),
    (Fraction(5, 7), (1, 2, 2)),
    (Fraction(1, 5), (5,)),
]


def test_rational_to_cf_examples():
    for r, w in EXPANSIONS:
        assert rational_to_cf(r) == w
        assert cf_to_rational(w) == r


def test_rational_to_cf_rejects_out_of_range():
    for bad in (Fraction(0), Fraction(1), Fraction(-1, 2), Fraction(5, 4)):
        with pytest.raises(ValueError):
            rational_to_cf(bad)


def test_cf_roundtrip_every_denominator_up_to_500():
    for q in range(2, 501):
        for p in range(1, q):
            if math.gcd(p, q) != 1:
                continue
            r = Fraction(p, q)
            w = rational_to_cf(r)
            assert w[-1] >= 2
            assert all(a >= 1 for a in w)
            assert cf_to_rational(w) == r


def test_check_word_rejections():
    for bad in ((), (1,), (2, 1), (0, 2), (2, -3), (2.0,), (True, 2)):
        with pytest.raises(ValueError):
            check_word(bad)
    assert check_word([1, 2]) == (1, 2)
    assert check_word((2,)) == (2,)


def test_check_block_allows_non_reduced():
    assert check_block([1]) == (1,)
    assert check_block((2, 1)) == (2, 1)
    with pytest.raises(ValueError):
        check_block(())
    assert check_block((), allow_empty=True) == ()
    with pytest.raises(ValueError):
        check_block((0,))


def test_digit_sum_and_level():
    assert digit_sum((2,)) == 2
    assert digit_sum((1, 1, 2)) == 4
    assert word_level((2,)) == 0
    assert word_level((1, 1, 2)) == 2


def test_code_string_examples():
    assert cf_to_code((2,)) == ""
    assert cf_to_code((3,)) == "0"
    assert cf_to_code((1, 2)) == "1"
    assert cf_to_code((4,)) == "00"
    assert cf_to_code((1, 3)) == "01"
    assert cf_to_code((2, 2)) == "10"
    assert cf_to_code((1, 1, 2)) == "11"
    assert code_to_cf("") == (2,)
    assert code_to_cf("01") == (1, 3)
    assert code_to_cf("110") == (2, 1, 2)


def test_code_roundtrip_all_lengths_up_to_14():
    for length in range(15):
        for pos in range(1 << length):
            w = code_int_to_cf(pos, length)
            assert w[-1] >= 2
            assert sum(w) == length + 2
            assert cf_to_code_int(w) == (pos, length)
        # spot the string form on the ends of the range
        for pos in (0, (1 << length) - 1):
            code = format(pos, f"0{length}b") if length else ""
            assert cf_to_code(code_int_to_cf(pos, length)) == code
            assert code_to_cf(code) == code_int_to_cf(pos, length)


def test_code_length_equals_digit_sum_minus_two():
    for q in range(2, 200):
        for p in range(1, q):
            if math.gcd(p, q) == 1:
                w = rational_to_cf(Fraction(p, q))
                assert len(cf_to_code(w)) == sum(w) - 2


def test_code_errors():
    with pytest.raises(ValueError):
        code_to_cf("0a1")
    with pytest.raises(ValueError):
        code_int_to_cf(4, 2)
    with pytest.raises(ValueError):
        code_int_to_cf(0, -1)


def test_format_parse():
    assert format_cf((1, 1, 2)) == "1,1,2"
    assert parse_cf("1,1,2") == (1, 1, 2)
    assert format_block((2, 1)) == "2,1"
    assert format_rational(Fraction(3, 7)) == "3/7"
    assert parse_rational("3/7") == Fraction(3, 7)
    with pytest.raises(ValueError):
        parse_cf("1,x,2")
    with pytest.raises(ValueError):
        parse_cf("2,1")
    with pytest.raises(ValueError):
        parse_rational("3/0")
    with pytest.raises(ValueError):
        parse_rational("zzz")
    with pytest.raises(ValueError):
        format_cf((1,))


def test_dyadic_normalization():
    assert Dyadic(2, 2) == Dyadic(1, 1)
    assert Dyadic(12, 4) == Dyadic(3, 2)
    assert Dyadic(0, 9) == Dyadic(0, 0)
    assert Dyadic(3, 0).as_fraction() == Fraction(3)
    with pytest.raises(ValueError):
        Dyadic(1, -1)


def test_dyadic_arithmetic_and_text():
    h = Dyadic(3, 2)
    assert h.as_fraction() == Fraction(3, 4)
    assert h.halved() == Dyadic(3, 3)
    assert float(h) == 0.75
    assert str(h) == "3/2^2"
    assert h.decimal() == "0.75"
    assert Dyadic(1, 1).decimal() == "0.5"
    assert Dyadic(5, 3).decimal() == "0.625"
    assert Dyadic(7, 0).decimal() == "7"
    assert Dyadic(-3, 2).decimal() == "-0.75"
    assert Dyadic(1, 10).decimal() == "0.0009765625"


def test_dyadic_ordering():
    values = [Dyadic(3, 2), Dyadic(1, 1), Dyadic(1, 4), Dyadic(5, 3)]
    ordered = sorted(values)
    assert [v.as_fraction() for v in ordered] == sorted(v.as_fraction() for v in values)
    assert Dyadic(1, 2) < Dyadic(1, 1)
    assert Dyadic(1, 1) <= Dyadic(2, 1)
    assert not Dyadic(3, 2) < Dyadic(3, 2)

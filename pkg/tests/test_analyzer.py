import json
import random
from fractions import Fraction

import numpy as np
import pytest

from minklab import (
    OrderingId,
    aks_stream,
    block_patterns,
    cf_to_code,
    champernowne_bits,
    classify_occurrences,
    count_block,
    count_block_naive,
    cross_check_pattern_vs_direct,
    cumulative_digit_count,
    cylinder_gauss,
    divided_ratio_curve,
    empirical_cdf,
    farey_stream,
    fisher_yates_permutation,
    frequency_report,
    kepler_level,
    kepler_perm_stream,
    kepler_stream,
    pattern_counts_in_bits,
)
from minklab.analyzer import _ArrayCounter, parse_cutoff
from minklab.levels import (
    boundary_masks,
    iter_level_arrays,
    level_code_bits,
    level_word_lengths,
    words_to_arrays,
)

PREFIX_12 = [2, 3, 1, 2, 4, 1, 3, 2, 2, 1, 1, 2, 5][:12]


def test_count_block_first_twelve():
    assert count_block(kepler_stream(), 12, (2,)) == 5
    assert count_block(kepler_stream(), 12, (1,)) == 4
    assert count_block(kepler_stream(), 12, (2, 2)) == 1
    assert count_block(kepler_stream(), 12, (1, 2)) == 2
    assert count_block(iter(PREFIX_12), 12, (2,)) == 5


def test_count_block_short_input():
    with pytest.warns(UserWarning):
        assert count_block(kepler_stream(), 1, (1, 2)) == 0
    with pytest.raises(ValueError):
        count_block(kepler_stream(), -1, (2,))
    # a stream that runs dry mid-request just stops counting
    assert count_block(iter([2, 2]), 10, (2,)) == 2


def test_count_block_naive_agrees():
    digits = kepler_stream().take(2000)
    for d in [(1,), (2,), (1, 2), (2, 1), (2, 2), (1, 1, 2)]:
        assert count_block_naive(digits, d) == count_block(iter(digits), 2000, d)


def test_classify_first_twelve():
    br = classify_occurrences(kepler_stream(), 12, (2,))
    assert (br.start, br.middle, br.end, br.divided) == (1, 0, 4, 0)
    assert br.total == 5
    br = classify_occurrences(kepler_stream(), 12, (1, 2))
    assert (br.start, br.middle, br.end, br.divided) == (0, 0, 2, 0)
    br = classify_occurrences(kepler_stream(), 12, (3, 2))
    assert (br.start, br.middle, br.end, br.divided) == (0, 0, 0, 1)


def test_classify_divided_needs_word_end():
    # blocks whose split would end a word in a digit 1 can never divide
    for d in ((1, 1), (1, 2), (1, 3)):
        br = classify_occurrences(kepler_stream(), 5000, d)
        assert br.divided == 0
    br = classify_occurrences(kepler_stream(), 5000, (2, 1))
    assert br.divided > 0


def test_classify_short_input_warns():
    with pytest.warns(UserWarning):
        br = classify_occurrences(kepler_stream(), 1, (1, 2))
    assert br.total == 0


def test_block_patterns():
    assert block_patterns((1,)) == ((1, 1), (1, 0))
    assert block_patterns((2,)) == ((1, 0, 1), (1, 0, 0))
    assert block_patterns((2, 1)) == ((1, 1, 0, 1), (1, 1, 0, 0))
    assert block_patterns((1, 2)) == ((1, 0, 1, 1), (1, 0, 1, 0))


def test_pattern_counts_fast_path_matches_fallback():
    n_bits = 5000
    bits = champernowne_bits().take(n_bits)
    for d in [(1,), (2,), (2, 1), (1, 2)]:
        fast = pattern_counts_in_bits(champernowne_bits(), n_bits, d)
        slow = pattern_counts_in_bits(iter(bits), n_bits, d)
        assert fast == slow
    # a short source stops early instead of raising
    assert pattern_counts_in_bits(iter([1, 0]), 10, (1,)) == (0, 1)


def test_array_counter_chunk_invariance():
    rng = random.Random(7)
    lens = [rng.randint(1, 5) for _ in range(1500)]
    digits = np.array([rng.randint(1, 4) for _ in range(sum(lens))], dtype=np.int16)
    starts, ends = boundary_masks(np.array(lens, dtype=np.int64))
    blocks = [(1,), (2, 1), (3, 2, 1), (2, 2)]

    def run(step):
        counter = _ArrayCounter(blocks)
        for i in range(0, len(digits), step):
            counter.feed(digits[i:i + step], starts[i:i + step], ends[i:i + step])
        out = {b: (counter.totals[b], counter.breakdown(b)) for b in blocks}
        counter.close()
        return out

    whole = run(len(digits))
    for step in (1, 3, 17, 256):
        assert run(step) == whole
    for b in blocks:
        total, br = whole[b]
        assert br.total == total == count_block_naive(list(digits), b)


def test_array_counter_threads_match():
    digits = np.array(kepler_stream().take(4000), dtype=np.int16)
    blocks = [(1,), (2, 1)]
    one = _ArrayCounter(blocks, threads=1)
    two = _ArrayCounter(blocks, threads=2)
    for c in (one, two):
        c.feed(digits)
        c.close()
    assert one.totals == two.totals


def test_array_counter_rejects_empty_pattern():
    with pytest.raises(ValueError):
        _ArrayCounter([()])


def test_parse_cutoff():
    assert parse_cutoff(100) == ("100", 100)
    assert parse_cutoff("250") == ("250", 250)
    assert parse_cutoff("digits:250") == ("digits:250", 250)
    assert parse_cutoff("level:4") == ("level:4", 32)
    with pytest.raises(ValueError):
        parse_cutoff("level:x")


def test_frequency_report_golden():
    rep = frequency_report(kepler_stream(), cutoffs=["level:4", "level:6"],
                           blocks=[(1,), (2,), (1, 2)])
    lines = rep.to_csv().splitlines()
    assert lines[0] == "cutoff,n_digits,block,count,freq,target,abs_err,start,middle,end,divided"
    assert lines[1] == "level:4,32,1,12,0.375,0.5,0.125,7,5,0,0"
    assert lines[2] == "level:4,32,2,12,0.375,0.25,0.125,3,1,8,0"
    assert lines[3] == 'level:4,32,"1,2",5,0.15625,0.125,0.03125,1,0,4,0'
    assert lines[4] == "level:6,192,1,80,0.4166666666666667,0.5,0.08333333333333333,31,49,0,0"
    assert len(lines) == 7


def test_frequency_report_matches_streaming_paths():
    cutoffs = [50, 377, 2000]
    blocks = [(1,), (2, 1), (2, 2), (1, 1, 2)]
    rep = frequency_report(kepler_stream(), cutoffs, blocks)
    for row in rep.rows:
        n = row.n_digits
        assert row.count == count_block(kepler_stream(), n, row.block)
        br = classify_occurrences(kepler_stream(), n, row.block)
        assert (row.start, row.middle, row.end, row.divided) == \
            (br.start, br.middle, br.end, br.divided)
        assert row.freq == Fraction(row.count, n)


def test_frequency_report_json():
    rep = frequency_report(kepler_stream(), [32], [(1,)])
    doc = json.loads(rep.to_json())
    assert doc["meta"]["tool"] == "minklab"
    assert doc["meta"]["order"] == "kepler"
    assert doc["meta"]["seed"] is None
    assert doc["meta"]["blocks"] == ["1"]
    assert doc["rows"][0]["block"] == "1"
    assert doc["rows"][0]["count"] == 12
    assert "flags" not in doc["rows"][0]


def test_frequency_report_flags_short_cutoff():
    with pytest.warns(UserWarning):
        rep = frequency_report(kepler_stream(), [1], [(1, 2)])
    doc = json.loads(rep.to_json())
    assert doc["rows"][0]["flags"] == ["block_longer_than_cutoff"]
    assert rep.rows[0].count == 0


def test_frequency_report_gauss_target():
    rep = frequency_report(kepler_stream(), [500], [(1,), (2,)], target="gauss")
    for row in rep.rows:
        assert row.target == pytest.approx(cylinder_gauss(row.block))
    with pytest.raises(ValueError):
        frequency_report(kepler_stream(), [10], [(1,)], target="lebesgue")


def test_frequency_report_needs_fresh_stream():
    s = kepler_stream()
    next(s)
    with pytest.raises(ValueError):
        frequency_report(s, [10], [(1,)])
    with pytest.raises(ValueError):
        frequency_report(champernowne_bits(), [10], [(1,)])


def test_frequency_report_farey_and_aks():
    # word batching drives these orders instead of the level recursion
    for make in (farey_stream, aks_stream):
        rep = frequency_report(make(), [2500], [(1,), (2, 1)])
        for row in rep.rows:
            assert row.count == count_block(make(), 2500, row.block)


def test_divided_ratio_curve():
    curve = divided_ratio_curve(kepler_stream(), (2, 1), [3, 4, 6])
    assert [L for L, _ in curve] == [3, 4, 6]
    for L, ratio in curve:
        n = cumulative_digit_count(L)
        br = classify_occurrences(kepler_stream(), n, (2, 1))
        assert ratio == Fraction(br.divided, n - 1)
    with pytest.raises(ValueError):
        divided_ratio_curve(kepler_stream(), (2, 1), [])
    with pytest.raises(ValueError):
        divided_ratio_curve(kepler_stream(), (2, 1), [0, 3])


def test_divided_count_bounded_by_boundaries():
    # a length-k occurrence can straddle a boundary in at most k-1 ways
    for L in (6, 10):
        n = cumulative_digit_count(L)
        words = (1 << L) - 1
        for d in ((2, 1), (2, 2), (2, 1, 2)):
            br = classify_occurrences(kepler_stream(), n, d)
            assert br.divided <= (len(d) - 1) * (words - 1)


def test_empirical_cdf():
    # first seven rationals: 1/2, 1/3, 2/3, 1/4, 3/4, 2/5, 3/5
    [(x, f)] = empirical_cdf(OrderingId("kepler"), 7, [Fraction(1, 2)])
    assert (x, f) == (Fraction(1, 2), Fraction(4, 7))
    [(_, f)] = empirical_cdf(OrderingId("kepler"), 7, [Fraction(1, 3)])
    assert f == Fraction(2, 7)
    [(_, f)] = empirical_cdf(OrderingId("kepler"), 1, [Fraction(1, 2)])
    assert f == Fraction(1, 1)
    with pytest.raises(ValueError):
        empirical_cdf(OrderingId("kepler"), 0, [Fraction(1, 2)])


def test_empirical_cdf_multiple_points():
    points = empirical_cdf(OrderingId("kepler"), 31,
                           [Fraction(1, 4), Fraction(1, 2), Fraction(3, 4)])
    fs = [f for _, f in points]
    assert fs[0] <= fs[1] <= fs[2]
    assert all(0 <= f <= 1 for f in fs)


def test_cross_check_gap_shrinks():
    small = cross_check_pattern_vs_direct((1,), levels=6)
    big = cross_check_pattern_vs_direct((1,), levels=10)
    assert big.gap < small.gap
    assert small.n_digits == cumulative_digit_count(6)
    assert small.count_direct == count_block(kepler_stream(), small.n_digits, (1,))
    c1, c0 = pattern_counts_in_bits(champernowne_bits(), small.n_bits, (1,))
    assert (small.count_tail_one, small.count_tail_zero) == (c1, c0)


def test_level_arrays_match_streaming_enumeration():
    for l, digits, lens in iter_level_arrays(10):
        words = list(kepler_level(l))
        assert len(lens) == len(words) == 1 << l
        assert lens.tolist() == [len(w) for w in words]
        assert digits.tolist() == [d for w in words for d in w]
        assert lens.tolist() == level_word_lengths(l).tolist()


def test_level_arrays_permuted():
    seed = 11
    for l, digits, lens in iter_level_arrays(6, perm_seed=seed):
        perm = fisher_yates_permutation(1 << l, seed ^ l)
        words = list(kepler_level(l))
        expected = [words[i] for i in perm]
        assert lens.tolist() == [len(w) for w in expected]
        assert digits.tolist() == [d for w in expected for d in w]


def test_level_arrays_match_perm_stream():
    seed = 5
    flat = []
    for _, digits, _ in iter_level_arrays(6, perm_seed=seed):
        flat.extend(digits.tolist())
    assert flat == kepler_perm_stream(seed).take(len(flat))


def test_level_code_bits():
    for l in range(9):
        expected = [int(c) for w in kepler_level(l) for c in cf_to_code(w)]
        assert level_code_bits(l).tolist() == expected
    with pytest.raises(ValueError):
        level_code_bits(33)


def test_boundary_masks():
    starts, ends = boundary_masks(np.array([1, 2, 3], dtype=np.int64))
    assert starts.tolist() == [True, True, False, True, False, False]
    assert ends.tolist() == [True, False, True, False, False, True]


def test_words_to_arrays():
    digits, lens = words_to_arrays([(2,), (1, 2), (1, 1, 2)])
    assert digits.tolist() == [2, 1, 2, 1, 1, 2]
    assert lens.tolist() == [1, 2, 3]


def test_iter_level_arrays_validation():
    with pytest.raises(ValueError):
        list(iter_level_arrays(-1))

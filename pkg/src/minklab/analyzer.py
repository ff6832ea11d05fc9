"""Block occurrence counting, classification, and frequency reports.

Counting is overlapping: a block of length k occurs at every position i with
digits[i:i+k] equal to the block, and only occurrences that fit entirely
inside the first n digits are counted.  Each occurrence is classified against
the word boundaries of the stream: it either starts a word without ending it,
sits strictly inside one, ends one (whole-word matches count here), or is
divided over two or more words.

Counts stay exact integers and frequencies exact fractions until they are
serialized.  Bulk runs go through the vectorized per-level arrays; the pure
streaming path and a naive quadratic scan are kept as mutually checking
references.
"""

from __future__ import annotations

import csv
import io
import json
import os
import warnings
from collections import deque
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from . import __version__
from .cfcore import cf_to_rational, check_block, format_block
from .levels import boundary_masks, iter_level_arrays, level_code_bits, words_to_arrays
from .qmark import cylinder_gauss, cylinder_qmark
from .streams import DigitStream, champernowne_bits, kepler_stream
from .trees import OrderingId, cumulative_bit_count, cumulative_digit_count, iter_ordering

Block = tuple[int, ...]

_BATCH_DIGITS = 1 << 16


def thread_count() -> int:
    """Worker threads for chunked counting; MINKLAB_THREADS, default 1."""
    try:
        return max(1, int(os.environ.get("MINKLAB_THREADS", "1")))
    except ValueError:
        return 1


@dataclass(frozen=True)
class OccurrenceBreakdown:
    start: int
    middle: int
    end: int
    divided: int

    @property
    def total(self) -> int:
        return self.start + self.middle + self.end + self.divided


def count_block(s: Iterable[int], n: int, d) -> int:
    """Occurrences of block d inside the first n digits of a stream."""
    d = check_block(d)
    k = len(d)
    if n < 0:
        raise ValueError("n must be >= 0")
    if n < k:
        warnings.warn(f"block of length {k} cannot occur in {n} digits", stacklevel=2)
        return 0
    count = 0
    window: deque[int] = deque(maxlen=k)
    it = iter(s)
    for _ in range(n):
        try:
            window.append(next(it))
        except StopIteration:
            break
        if len(window) == k and tuple(window) == d:
            count += 1
    return count


def count_block_naive(digits: Sequence[int], d) -> int:
    """Quadratic reference scan over an in-memory digit sequence."""
    d = check_block(d)
    k = len(d)
    return sum(1 for i in range(len(digits) - k + 1) if tuple(digits[i:i + k]) == d)


def classify_occurrences(s: DigitStream, n: int, d) -> OccurrenceBreakdown:
    """Count occurrences in the first n digits, split by word position."""
    d = check_block(d)
    k = len(d)
    if n < k:
        warnings.warn(f"block of length {k} cannot occur in {n} digits", stacklevel=2)
        return OccurrenceBreakdown(0, 0, 0, 0)
    counts = [0, 0, 0, 0]  # start, middle, end, divided
    window: deque[tuple[int, int, int, bool]] = deque(maxlen=k)
    for _ in range(n):
        digit = next(s)
        window.append((digit, s.word_index, s.offset_in_word, s.last_in_word))
        if len(window) < k or any(rec[0] != v for rec, v in zip(window, d)):
            continue
        first, last = window[0], window[-1]
        if first[1] != last[1]:
            counts[3] += 1
        elif last[3]:
            counts[2] += 1
        elif first[2] == 0:
            counts[0] += 1
        else:
            counts[1] += 1
    return OccurrenceBreakdown(*counts)


def block_patterns(d) -> tuple[tuple[int, ...], tuple[int, ...]]:
    """The two bit patterns whose combined frequency tracks block d.

    The base string 1 0^(dk-1) 1 0^(d(k-1)-1) ... 1 0^(d1-1) is extended by a
    final 1 and a final 0; each pattern has length sum(d)+1.
    """
    d = check_block(d)
    base: list[int] = []
    for v in reversed(d):
        base.append(1)
        base.extend([0] * (v - 1))
    return tuple(base) + (1,), tuple(base) + (0,)


class _ArrayCounter:
    """Chunked overlapping counter over numpy digit arrays.

    Chunks arrive with optional word-start/word-end masks; a tail of the last
    max(k)-1 positions is carried so occurrences spanning chunk joints are
    counted exactly once.  Chunking is invisible in the totals.
    """

    def __init__(self, blocks: Sequence[Block], classify: bool = True, threads: int = 1):
        # Patterns are taken verbatim: digit blocks here, raw bit patterns in
        # the pattern-counting path.  Callers validate digit blocks.
        self.blocks = [tuple(b) for b in blocks]
        if any(len(b) == 0 for b in self.blocks):
            raise ValueError("patterns must be non-empty")
        self.kmax = max(len(b) for b in self.blocks)
        self.classify = classify
        self.n = 0
        self.totals = {b: 0 for b in self.blocks}
        self.breakdowns = {b: [0, 0, 0, 0] for b in self.blocks}
        self._tail_d = np.empty(0, dtype=np.int64)
        self._tail_s = np.empty(0, dtype=bool)
        self._tail_e = np.empty(0, dtype=bool)
        self._pool = ThreadPoolExecutor(max_workers=threads) if threads > 1 else None

    def close(self):
        if self._pool is not None:
            self._pool.shutdown()

    def feed(self, digits: np.ndarray, starts: np.ndarray | None = None,
             ends: np.ndarray | None = None):
        if len(digits) == 0:
            return
        if starts is None:
            starts = np.zeros(len(digits), dtype=bool)
            ends = np.zeros(len(digits), dtype=bool)
        tail_len = len(self._tail_d)
        comb_d = np.concatenate([self._tail_d, digits]) if tail_len else np.asarray(digits)
        comb_s = np.concatenate([self._tail_s, starts]) if tail_len else np.asarray(starts)
        comb_e = np.concatenate([self._tail_e, ends]) if tail_len else np.asarray(ends)

        def one(b: Block):
            k = len(b)
            m_total = len(comb_d) - k + 1
            if m_total < 1:
                return b, 0, (0, 0, 0, 0)
            match = comb_d[:m_total] == b[0]
            for j in range(1, k):
                match = match & (comb_d[j:j + m_total] == b[j])
            s0 = max(0, tail_len - k + 1)  # windows counted in earlier feeds end before s0
            match = match[s0:]
            total = int(match.sum())
            if not self.classify:
                return b, total, (0, 0, 0, 0)
            m = len(match)
            cross = np.zeros(m, dtype=bool)
            for j in range(1, k):
                cross |= comb_s[s0 + j:s0 + j + m]
            begins = comb_s[s0:s0 + m]
            ends_at = comb_e[s0 + k - 1:s0 + k - 1 + m]
            inside = match & ~cross
            div = int((match & cross).sum())
            endc = int((inside & ends_at).sum())
            startc = int((inside & ~ends_at & begins).sum())
            midc = total - div - endc - startc
            return b, total, (startc, midc, endc, div)

        results = self._pool.map(one, self.blocks) if self._pool else map(one, self.blocks)
        for b, total, quad in results:
            self.totals[b] += total
            acc = self.breakdowns[b]
            for i in range(4):
                acc[i] += quad[i]
        self.n += len(digits)
        if self.kmax > 1:
            self._tail_d = comb_d[-(self.kmax - 1):].copy()
            self._tail_s = comb_s[-(self.kmax - 1):].copy()
            self._tail_e = comb_e[-(self.kmax - 1):].copy()

    def breakdown(self, b: Block) -> OccurrenceBreakdown:
        return OccurrenceBreakdown(*self.breakdowns[b])


def _array_chunks(stream: DigitStream, max_n: int):
    """Yield (digits, starts, ends) chunks covering at least max_n digits."""
    if stream.kind == "champernowne":
        raise ValueError("block analysis runs on CF digit streams, not bit streams")
    if not stream.is_fresh:
        raise ValueError("analysis requires a fresh stream")
    if stream.kind in ("kepler", "kepler-perm"):
        max_level = 0
        while cumulative_digit_count(max_level + 1) < max_n:
            max_level += 1
        seed = stream.seed if stream.kind == "kepler-perm" else None
        for _, digits, lens in iter_level_arrays(max_level, perm_seed=seed):
            starts, ends = boundary_masks(lens)
            yield digits, starts, ends
        return
    words = stream.words()
    done = 0
    batch: list[tuple[int, ...]] = []
    size = 0
    for w in words:
        batch.append(w)
        size += len(w)
        if size >= _BATCH_DIGITS:
            digits, lens = words_to_arrays(batch)
            yield digits, *boundary_masks(lens)
            done += size
            batch, size = [], 0
            if done >= max_n:
                return
    if batch:  # pragma: no cover - orderings here are infinite
        digits, lens = words_to_arrays(batch)
        yield digits, *boundary_masks(lens)


def _count_at_cutoffs(stream: DigitStream, blocks: Sequence[Block],
                      cutoff_ns: Sequence[int], classify: bool = True,
                      threads: int | None = None):
    """One pass; returns {cutoff_n: {block: OccurrenceBreakdown-with-total}}."""
    targets = sorted(set(cutoff_ns))
    if not targets or targets[0] < 0:
        raise ValueError("cutoffs must be non-negative and non-empty")
    counter = _ArrayCounter(blocks, classify=classify,
                            threads=thread_count() if threads is None else threads)
    out: dict[int, dict[Block, tuple[int, OccurrenceBreakdown]]] = {}
    pending = deque(targets)
    try:
        for digits, starts, ends in _array_chunks(stream, targets[-1]):
            pos = 0
            while pending and counter.n + (len(digits) - pos) >= pending[0]:
                take = pending[0] - counter.n
                counter.feed(digits[pos:pos + take], starts[pos:pos + take], ends[pos:pos + take])
                pos += take
                n_cut = pending.popleft()
                out[n_cut] = {b: (counter.totals[b], counter.breakdown(b)) for b in counter.blocks}
            if not pending:
                break
            counter.feed(digits[pos:], starts[pos:], ends[pos:])
    finally:
        counter.close()
    if pending:
        raise ValueError("stream ended before the largest cutoff")
    return out


def parse_cutoff(spec) -> tuple[str, int]:
    """Cutoff as 'level:L' (first L levels), 'digits:N', or a plain count."""
    if isinstance(spec, int):
        return str(spec), spec
    text = str(spec).strip()
    if text.startswith("level:"):
        levels = int(text.split(":", 1)[1])
        return text, cumulative_digit_count(levels)
    if text.startswith("digits:"):
        return text, int(text.split(":", 1)[1])
    return text, int(text)


@dataclass(frozen=True)
class FrequencyRow:
    cutoff: str
    n_digits: int
    block: Block
    count: int
    freq: Fraction
    target: Fraction | float
    abs_err: float
    start: int
    middle: int
    end: int
    divided: int
    flags: tuple[str, ...] = ()


@dataclass
class FrequencyReport:
    meta: dict
    rows: list[FrequencyRow] = field(default_factory=list)

    _COLUMNS = ("cutoff", "n_digits", "block", "count", "freq", "target",
                "abs_err", "start", "middle", "end", "divided")

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(self._COLUMNS)
        for r in self.rows:
            writer.writerow([r.cutoff, r.n_digits, format_block(r.block), r.count,
                             repr(float(r.freq)), repr(float(r.target)),
                             repr(r.abs_err), r.start, r.middle, r.end, r.divided])
        return buf.getvalue()

    def to_json(self) -> str:
        rows = []
        for r in self.rows:
            row = {
                "cutoff": r.cutoff,
                "n_digits": r.n_digits,
                "block": format_block(r.block),
                "count": r.count,
                "freq": float(r.freq),
                "target": float(r.target),
                "abs_err": r.abs_err,
                "start": r.start,
                "middle": r.middle,
                "end": r.end,
                "divided": r.divided,
            }
            if r.flags:
                row["flags"] = list(r.flags)
            rows.append(row)
        return json.dumps({"meta": self.meta, "rows": rows}, indent=2) + "\n"


def frequency_report(stream: DigitStream, cutoffs, blocks, target: str = "qmark",
                     threads: int | None = None) -> FrequencyReport:
    """Frequency table of several blocks at several cutoffs, in one pass."""
    if target not in ("qmark", "gauss"):
        raise ValueError("target must be 'qmark' or 'gauss'")
    blocks = [check_block(b) for b in blocks]
    cuts = [parse_cutoff(c) for c in cutoffs]
    cuts.sort(key=lambda lc: lc[1])
    by_n = _count_at_cutoffs(stream, blocks, [n for _, n in cuts], threads=threads)
    targets = {b: cylinder_qmark(b).as_fraction() if target == "qmark" else cylinder_gauss(b)
               for b in blocks}
    meta = {
        "tool": "minklab",
        "version": __version__,
        "order": stream.kind,
        "seed": stream.seed,
        "target": target,
        "cutoffs": [label for label, _ in cuts],
        "blocks": [format_block(b) for b in blocks],
    }
    report = FrequencyReport(meta=meta)
    for label, n in cuts:
        for b in blocks:
            total, br = by_n[n][b]
            flags = ()
            if n < len(b):
                flags = ("block_longer_than_cutoff",)
                warnings.warn(f"block {b} longer than cutoff {n}", stacklevel=2)
            freq = Fraction(total, n) if n else Fraction(0)
            tgt = targets[b]
            err = abs(float(freq) - float(tgt)) if isinstance(tgt, float) \
                else abs(float(freq - tgt))
            report.rows.append(FrequencyRow(label, n, b, total, freq, tgt, err,
                                            br.start, br.middle, br.end, br.divided, flags))
    return report


def divided_ratio_curve(s: DigitStream, d, levels: Sequence[int]) -> list[tuple[int, Fraction]]:
    """Share of divided occurrences of d among all windows, per level cutoff.

    Cutoff L means the first L complete levels, n = L * 2^(L-1) digits; the
    ratio divides the divided-occurrence count by the n-k+1 window positions.
    """
    d = check_block(d)
    ls = sorted(set(levels))
    if not ls or ls[0] < 1:
        raise ValueError("levels must be >= 1")
    by_n = _count_at_cutoffs(s, [d], [cumulative_digit_count(L) for L in ls])
    out = []
    for L in ls:
        n = cumulative_digit_count(L)
        br = by_n[n][d][1]
        windows = n - len(d) + 1
        out.append((L, Fraction(br.divided, windows) if windows > 0 else Fraction(0)))
    return out


def pattern_counts_in_bits(bits: DigitStream | Iterable[int], n_bits: int, d) -> tuple[int, int]:
    """Occurrences of the two derived bit patterns in the first n_bits."""
    p_one, p_zero = block_patterns(d)
    if isinstance(bits, DigitStream) and bits.kind == "champernowne" and bits.is_fresh:
        counter = _ArrayCounter([p_one, p_zero], classify=False)
        emitted = 0
        level = 0
        while emitted < n_bits:
            arr = level_code_bits(level)
            take = arr[:n_bits - emitted] if emitted + len(arr) > n_bits else arr
            counter.feed(take.astype(np.int64, copy=False))
            emitted += len(take)
            level += 1
        counter.close()
        return counter.totals[p_one], counter.totals[p_zero]
    k = len(p_one)
    counts = [0, 0]
    window: deque[int] = deque(maxlen=k)
    it = iter(bits)
    for _ in range(n_bits):
        try:
            window.append(next(it))
        except StopIteration:
            break
        if len(window) == k:
            w = tuple(window)
            if w == p_one:
                counts[0] += 1
            elif w == p_zero:
                counts[1] += 1
    return counts[0], counts[1]


def empirical_cdf(order: OrderingId, n: int, xs) -> list[tuple[Fraction, Fraction]]:
    """Share of the first n rationals of the ordering lying at or below each x."""
    if n < 1:
        raise ValueError("n must be >= 1")
    points = [Fraction(x) for x in xs]
    counts = [0] * len(points)
    it = iter_ordering(order)
    for _ in range(n):
        v = cf_to_rational(next(it))
        for i, x in enumerate(points):
            if v <= x:
                counts[i] += 1
    return [(x, Fraction(c, n)) for x, c in zip(points, counts)]


@dataclass(frozen=True)
class CrossCheck:
    block: Block
    levels: int
    n_digits: int
    count_direct: int
    freq_direct: Fraction
    n_bits: int
    count_tail_one: int
    count_tail_zero: int
    freq_pattern: Fraction
    gap: float


def cross_check_pattern_vs_direct(d, levels: int) -> CrossCheck:
    """Direct block frequency versus combined bit-pattern frequency.

    Both are taken over the same first `levels` complete levels - n digits on
    the direct side, the corresponding bit count on the pattern side - and
    both tend to 2^-sum(d); the gap is reported and should shrink as levels
    grow.
    """
    d = check_block(d)
    n_digits = cumulative_digit_count(levels)
    n_bits = cumulative_bit_count(levels)
    by_n = _count_at_cutoffs(kepler_stream(), [d], [n_digits], classify=False)
    count = by_n[n_digits][d][0]
    c1, c0 = pattern_counts_in_bits(champernowne_bits(), n_bits, d)
    freq_direct = Fraction(count, n_digits)
    freq_pattern = Fraction(c1 + c0, n_bits)
    return CrossCheck(d, levels, n_digits, count, freq_direct,
                      n_bits, c1, c0, freq_pattern,
                      abs(float(freq_direct - freq_pattern)))

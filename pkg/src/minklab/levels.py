"""Vectorized per-level digit and bit arrays.

One tree level is held as a flat numpy digit array plus the word lengths, and
level l+1 is derived from level l in a handful of array operations: each word
contributes its bumped-first-digit child followed by its prepended-1 child.
The analyzer consumes these chunks; correctness is pinned against the pure
streaming enumeration in the tests.
"""

from __future__ import annotations

from typing import Iterator

import numpy as np

from .prng import fisher_yates_permutation

_DIGIT_DTYPE = np.int16  # max digit at level l is l+2; int16 is ample


def _ranges(starts: np.ndarray, lens: np.ndarray) -> np.ndarray:
    """Concatenation of arange(s, s+n) for each (s, n) pair; lens must be >= 1."""
    ends = np.cumsum(lens)
    step = np.ones(int(ends[-1]), dtype=np.int64)
    step[0] = starts[0]
    step[ends[:-1]] = starts[1:] - (starts[:-1] + lens[:-1] - 1)
    return np.cumsum(step)


def _offsets(lens: np.ndarray) -> np.ndarray:
    off = np.empty(len(lens), dtype=np.int64)
    off[0] = 0
    np.cumsum(lens[:-1], out=off[1:])
    return off


def _children_arrays(digits: np.ndarray, lens: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    n_words = len(lens)
    off = _offsets(lens)
    out_lens = np.empty(2 * n_words, dtype=np.int64)
    out_lens[0::2] = lens
    out_lens[1::2] = lens + 1
    # three chunks per word: left copy, a one-slot for the prepended 1, right copy
    src = np.empty(3 * n_words, dtype=np.int64)
    ln = np.empty(3 * n_words, dtype=np.int64)
    src[0::3] = off
    src[1::3] = 0
    src[2::3] = off
    ln[0::3] = lens
    ln[1::3] = 1
    ln[2::3] = lens
    out = digits[_ranges(src, ln)]
    out_off = _offsets(out_lens)
    out[out_off[1::2]] = 1   # right child starts with a fresh digit 1
    out[out_off[0::2]] += 1  # left child bumps the first digit
    return out, out_lens


def iter_level_arrays(max_level: int, perm_seed: int | None = None) -> Iterator[tuple[int, np.ndarray, np.ndarray]]:
    """Yield (level, digits, word_lengths) for levels 0..max_level.

    With perm_seed set, each yielded level is reordered by the same seeded
    shuffle the permuted stream uses (the recursion itself always advances the
    unpermuted level).
    """
    if max_level < 0:
        raise ValueError("max_level must be >= 0")
    digits = np.array([2], dtype=_DIGIT_DTYPE)
    lens = np.array([1], dtype=np.int64)
    for l in range(max_level + 1):
        if perm_seed is None:
            yield l, digits, lens
        else:
            perm = np.array(fisher_yates_permutation(1 << l, perm_seed ^ l), dtype=np.int64)
            p_lens = lens[perm]
            p_digits = digits[_ranges(_offsets(lens)[perm], p_lens)]
            yield l, p_digits, p_lens
        if l < max_level:
            digits, lens = _children_arrays(digits, lens)


def level_word_lengths(l: int) -> np.ndarray:
    """Word lengths of level l directly: popcount of the path code, plus one."""
    if l < 0:
        raise ValueError("level must be >= 0")
    codes = np.arange(1 << l, dtype=np.uint64)
    return np.bitwise_count(codes).astype(np.int64) + 1


def level_code_bits(l: int) -> np.ndarray:
    """The 2**l path codes of level l as one flat 0/1 array (counting order)."""
    if not 0 <= l <= 32:
        raise ValueError("level must be in 0..32")
    if l == 0:
        return np.empty(0, dtype=np.uint8)
    codes = np.arange(1 << l, dtype=">u4")
    bits = np.unpackbits(codes.view(np.uint8).reshape(-1, 4), axis=1)
    return np.ascontiguousarray(bits[:, 32 - l:]).ravel()


def boundary_masks(lens: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """(word-starts, word-ends) boolean masks over the flat digit array."""
    total = int(lens.sum())
    starts = np.zeros(total, dtype=bool)
    ends = np.zeros(total, dtype=bool)
    off = _offsets(lens)
    starts[off] = True
    ends[off + lens - 1] = True
    return starts, ends


def words_to_arrays(words) -> tuple[np.ndarray, np.ndarray]:
    """Flatten an iterable of digit tuples into (digits, word_lengths)."""
    lens = []
    flat = []
    for w in words:
        lens.append(len(w))
        flat.extend(w)
    return (np.array(flat, dtype=_DIGIT_DTYPE),
            np.array(lens, dtype=np.int64))

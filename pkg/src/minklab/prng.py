"""Deterministic PRNG and shuffle used for permuted orderings.

splitmix64 is pinned (same outputs on any platform or Python build), so a
seed fully determines every permuted stream forever; regression tests freeze
sample outputs.
"""

from __future__ import annotations

from typing import Iterator

_MASK = (1 << 64) - 1
_GAMMA = 0x9E3779B97F4A7C15


def splitmix64_stream(seed: int) -> Iterator[int]:
    """Infinite stream of 64-bit outputs of splitmix64 from the given seed."""
    state = seed & _MASK
    while True:
        state = (state + _GAMMA) & _MASK
        z = state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
        yield (z ^ (z >> 31)) & _MASK


def fisher_yates_permutation(n: int, seed: int) -> list[int]:
    """Shuffle of range(n): descending-index Fisher-Yates, j = next() mod (i+1)."""
    if n < 0:
        raise ValueError("n must be >= 0")
    perm = list(range(n))
    rng = splitmix64_stream(seed)
    for i in range(n - 1, 0, -1):
        j = next(rng) % (i + 1)
        perm[i], perm[j] = perm[j], perm[i]
    return perm

"""Shared brute-force oracles, deliberately independent of the package code."""

from __future__ import annotations

import itertools
from functools import lru_cache

import pytest


def _pattern(sub) -> tuple[int, ...]:
    ranks = sorted(range(len(sub)), key=sub.__getitem__)
    pat = [0] * len(sub)
    for r, i in enumerate(ranks, 1):
        pat[i] = r
    return tuple(pat)


def contains_pattern(seq, pattern) -> bool:
    pattern = tuple(pattern)
    return any(
        _pattern([seq[i] for i in idx]) == pattern
        for idx in itertools.combinations(range(len(seq)), len(pattern))
    )


_BAD = {(2, 4, 1, 3), (3, 1, 4, 2)}


def brute_separable(seq) -> bool:
    return all(
        _pattern([seq[i] for i in idx]) not in _BAD
        for idx in itertools.combinations(range(len(seq)), 4)
    )


@lru_cache(maxsize=None)
def brute_sep(n: int) -> tuple[tuple[int, ...], ...]:
    """All separable permutations of [1, n] by filtering every element of S_n."""
    return tuple(p for p in itertools.permutations(range(1, n + 1)) if brute_separable(p))


def brute_indecomposable(seq) -> bool:
    n = len(seq)
    return all(max(seq[:j]) != j for j in range(1, n))


@pytest.fixture
def rng():
    import numpy as np

    return np.random.default_rng(20240611)

"""Exact-uniform sampling of separable permutations.

A separable permutation of size n >= 2 is indecomposable or skew
indecomposable with equal counts. An indecomposable one splits uniquely as
``B ⊖ rest`` with B its first skew-indecomposable block, and the number of
those with ``|B| = k`` is ``2 s_{n-1}`` (k = 1) or ``s_k s_{n-k}`` (k >= 2),
over a total of ``s_n``. Drawing k with those integer weights, then B and
``rest`` recursively, gives the uniform law; the skew case is the mirror
image. All weighted choices are exact integer draws.
"""

from __future__ import annotations

import bisect
import enum
import itertools
from collections.abc import Iterator
from functools import lru_cache

import numpy as np

from ._rng import randbelow
from .perm import Permutation
from .schroeder import SchroederTable, shared_value

__all__ = [
    "SepClass",
    "draw_first_block",
    "enumerate_sep",
    "iter_sep_values",
    "sample_sep",
    "sample_sep_of_block",
]

ENUMERATION_LIMIT = 10
_MEMO_LIMIT = 256


class SepClass(enum.Enum):
    ALL = "all"
    INDECOMPOSABLE = "indec"
    SKEW_INDECOMPOSABLE = "skewindec"

    @classmethod
    def parse(cls, text: str | SepClass) -> SepClass:
        if isinstance(text, cls):
            return text
        aliases = {
            "all": cls.ALL,
            "indec": cls.INDECOMPOSABLE,
            "indecomposable": cls.INDECOMPOSABLE,
            "skewindec": cls.SKEW_INDECOMPOSABLE,
            "skew_indecomposable": cls.SKEW_INDECOMPOSABLE,
        }
        try:
            return aliases[text.lower()]
        except KeyError:
            raise ValueError(f"unknown class {text!r}") from None


# --------------------------------------------------------------------------
# exhaustive enumeration (test oracle)


@lru_cache(maxsize=None)
def _enum(n: int, cls: SepClass) -> frozenset[tuple[int, ...]]:
    if n == 1:
        return frozenset({(1,)})
    if cls is SepClass.ALL:
        return _enum(n, SepClass.INDECOMPOSABLE) | _enum(n, SepClass.SKEW_INDECOMPOSABLE)
    out = set()
    for k in range(1, n):
        rest = _enum(n - k, SepClass.ALL)
        if cls is SepClass.INDECOMPOSABLE:
            # first skew block on the top k values
            for b in _enum(k, SepClass.SKEW_INDECOMPOSABLE):
                top = tuple(v + n - k for v in b)
                out.update(top + r for r in rest)
        else:
            for b in _enum(k, SepClass.INDECOMPOSABLE):
                out.update(b + tuple(v + k for v in r) for r in rest)
    return frozenset(out)


def enumerate_sep(n: int, cls: SepClass | str = SepClass.ALL) -> list[Permutation]:
    """All of SEP(n) (or the requested subclass), sorted; refuses n > 10."""
    cls = SepClass.parse(cls)
    if n < 1:
        raise ValueError("n must be >= 1")
    if n > ENUMERATION_LIMIT:
        raise ValueError(f"refusing to enumerate SEP({n}); limit is {ENUMERATION_LIMIT}")
    return [Permutation(p, 1) for p in sorted(_enum(n, cls))]


# --------------------------------------------------------------------------
# first-block draws


def _order(n: int) -> Iterator[int]:
    # 1, n-1, 2, n-2, ...: the block law piles its mass at both ends
    for i in range(1, n // 2 + 1):
        yield i
        if n - i != i:
            yield n - i


def _weight(n: int, j: int, s) -> int:
    if j == 1:
        return 2 * s(n - 1)
    return s(j) * s(n - j)


@lru_cache(maxsize=_MEMO_LIMIT)
def _cumulative(n: int) -> tuple[tuple[int, ...], tuple[int, ...]]:
    order = tuple(_order(n))
    cum = tuple(itertools.accumulate(_weight(n, j, shared_value) for j in order))
    return order, cum


def draw_first_block(n: int, rng: np.random.Generator, table: SchroederTable | None = None) -> int:
    """Length of the first (skew) indecomposable block given it is ``< n``."""
    if n < 2:
        raise ValueError("first-block law needs n >= 2")
    if n == 2:
        return 1
    if table is None and n <= _MEMO_LIMIT:
        order, cum = _cumulative(n)
        u = randbelow(rng, cum[-1])
        return order[bisect.bisect_right(cum, u)]
    s = shared_value if table is None else table.__getitem__
    u = randbelow(rng, s(n))
    acc = 0
    for j in _order(n):
        acc += _weight(n, j, s)
        if u < acc:
            return j
    raise AssertionError("weights do not sum to s_n")


# --------------------------------------------------------------------------
# sampling


def _check_size(n: int, table: SchroederTable | None) -> None:
    if n < 1:
        raise ValueError("n must be >= 1")
    if table is not None and n > table.max_n:
        raise ValueError(f"table covers n <= {table.max_n}, need {n}")


def iter_sep_values(
    n: int,
    cls: SepClass | str,
    rng: np.random.Generator,
    *,
    start: int = 1,
    table: SchroederTable | None = None,
) -> Iterator[int]:
    """Values of a uniform element of the class on ``[start, start+n-1]``, left to right.

    Lazy: stopping early only spends the randomness needed for the prefix.
    """
    cls = SepClass.parse(cls)
    _check_size(n, table)
    if table is None:
        shared_value(n)
    stack = [(n, cls, start)]
    while stack:
        size, c, lo = stack.pop()
        if size == 1:
            yield lo
            continue
        if c is SepClass.ALL:
            c = SepClass.INDECOMPOSABLE if randbelow(rng, 2) else SepClass.SKEW_INDECOMPOSABLE
        k = draw_first_block(size, rng, table)
        if c is SepClass.INDECOMPOSABLE:
            # B ⊖ rest: B skew indecomposable on the top k values
            stack.append((size - k, SepClass.ALL, lo))
            stack.append((k, SepClass.SKEW_INDECOMPOSABLE, lo + size - k))
        else:
            # B ⊕ rest: B indecomposable on the bottom k values
            stack.append((size - k, SepClass.ALL, lo + k))
            stack.append((k, SepClass.INDECOMPOSABLE, lo))


def sample_sep(
    n: int,
    cls: SepClass | str,
    rng: np.random.Generator,
    *,
    table: SchroederTable | None = None,
) -> Permutation:
    """Uniform random element of SEP(n) or of its (skew) indecomposable half."""
    return Permutation(tuple(iter_sep_values(n, cls, rng, table=table)), 1)


def sample_sep_of_block(
    block: tuple[int, int],
    cls: SepClass | str,
    rng: np.random.Generator,
    *,
    table: SchroederTable | None = None,
) -> Permutation:
    """Uniform element of the class on the block ``[a, b]`` (inclusive)."""
    a, b = block
    if b < a:
        raise ValueError(f"empty block [{a}, {b}]")
    if a < 1:
        raise ValueError("blocks live in the positive integers")
    n = b - a + 1
    return Permutation(tuple(iter_sep_values(n, cls, rng, start=a, table=table)), a)


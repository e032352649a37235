from collections import Counter
from fractions import Fraction

import numpy as np
import pytest
from conftest import brute_indecomposable, brute_sep
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import stats

from seplimit._rng import make_rng, randbelow
from seplimit.perm import is_indecomposable, is_separable, is_skew_indecomposable, parse_permutation
from seplimit.sampler import (
    SepClass,
    draw_first_block,
    enumerate_sep,
    iter_sep_values,
    sample_sep,
    sample_sep_of_block,
)
from seplimit.schroeder import block_law, compute_table, shared_value


@pytest.mark.parametrize("n", range(1, 9))
def test_enumeration_matches_brute_filter(n):
    assert [p.values for p in enumerate_sep(n)] == list(brute_sep(n))


def test_enumeration_examples():
    assert len(enumerate_sep(4)) == 22
    assert len(enumerate_sep(1)) == 1
    assert len(enumerate_sep(5, "indec")) == 45
    with pytest.raises(ValueError):
        enumerate_sep(11)


@pytest.mark.parametrize("n", range(2, 9))
def test_class_split_is_half(n):
    indec = enumerate_sep(n, SepClass.INDECOMPOSABLE)
    skew = enumerate_sep(n, SepClass.SKEW_INDECOMPOSABLE)
    assert len(indec) == len(skew) == shared_value(n) // 2
    assert all(brute_indecomposable(p.values) for p in indec)
    assert not set(indec) & set(skew)


def test_singleton_in_both_halves():
    assert enumerate_sep(1, "indec") == enumerate_sep(1, "skewindec") == enumerate_sep(1)


@pytest.mark.parametrize("n", range(2, 9))
def test_first_coordinate_count(n):
    assert sum(p[0] == 1 for p in enumerate_sep(n)) == shared_value(n - 1)


@pytest.mark.parametrize("n", range(3, 9))
def test_first_block_law_by_enumeration(n):
    law = block_law(n)
    counts = Counter()
    for p in enumerate_sep(n, "indec"):
        # B1 is the first skew-indecomposable block: prefix onto the top values
        counts[_first_minus_block(p.values)] += 1
    total = shared_value(n) // 2
    assert {j: Fraction(c, total) for j, c in counts.items()} == {
        j: w for j, w in enumerate(law.weights, 1) if w
    }


def _first_minus_block(vals):
    n = len(vals)
    lo = n + 1
    for k, v in enumerate(vals, 1):
        lo = min(lo, v)
        if lo == n - k + 1:
            return k


def test_draw_first_block_paths_agree():
    # memoized bisect path and the lazy scan must give the same draw for the same stream
    table = compute_table(60)
    for n in (3, 10, 60):
        a = [draw_first_block(n, make_rng(s)) for s in range(200)]
        b = [draw_first_block(n, make_rng(s), table) for s in range(200)]
        assert a == b
    with pytest.raises(ValueError):
        draw_first_block(1, make_rng(0))


def test_randbelow_bigint_is_in_range():
    rng = make_rng(3)
    m = 3**200 + 7
    xs = [randbelow(rng, m) for _ in range(200)]
    assert all(0 <= x < m for x in xs)
    assert max(xs) > m // 2
    with pytest.raises(ValueError):
        randbelow(rng, 0)


def test_small_cases():
    rng = make_rng(0)
    assert all(sample_sep(1, "all", rng).values == (1,) for _ in range(20))
    assert all(sample_sep(2, "indec", rng).values == (2, 1) for _ in range(20))
    assert all(sample_sep(2, "skewindec", rng).values == (1, 2) for _ in range(20))
    assert sample_sep_of_block((7, 7), "indec", rng).values == (7,)


def test_block_sampler():
    rng = make_rng(11)
    seen = set()
    for _ in range(3000):
        p = sample_sep_of_block((2, 6), "indec", rng)
        assert p.block_start == 2 and sorted(p.values) == [2, 3, 4, 5, 6]
        assert is_separable(p) and is_indecomposable(p)
        seen.add(p.values)
    assert parse_permutation("54623").values in seen
    assert parse_permutation("42365").values not in seen
    assert len(seen) == 45
    with pytest.raises(ValueError):
        sample_sep_of_block((5, 4), "all", rng)


def test_table_too_small():
    with pytest.raises(ValueError):
        sample_sep(20, "all", make_rng(0), table=compute_table(10))


def test_determinism():
    a = [sample_sep(40, "all", make_rng(5)).values for _ in range(3)]
    b = [sample_sep(40, "all", make_rng(5)).values for _ in range(3)]
    assert a == b
    r1, r2 = make_rng(9), make_rng(9)
    assert [sample_sep(12, "all", r1) for _ in range(10)] == [sample_sep(12, "all", r2) for _ in range(10)]


def test_lazy_prefix_is_prefix_of_full_draw():
    for seed in range(20):
        full = sample_sep(300, "all", make_rng(seed)).values
        it = iter_sep_values(300, "all", make_rng(seed))
        assert tuple(next(it) for _ in range(5)) == full[:5]


@pytest.mark.parametrize("cls", ["all", "indec", "skewindec"])
def test_uniform_at_n5(cls):
    rng = make_rng(1234)
    elems = [p.values for p in enumerate_sep(5, cls)]
    draws = 40 * len(elems) * 10
    counts = Counter(sample_sep(5, cls, rng).values for _ in range(draws))
    assert set(counts) == set(elems)
    obs = np.array([counts[e] for e in elems])
    assert stats.chisquare(obs).pvalue > 1e-4


@settings(max_examples=25, deadline=None)
@given(st.integers(1, 120), st.sampled_from(list(SepClass)), st.integers(0, 2**32))
def test_samples_are_separable_and_in_class(n, cls, seed):
    p = sample_sep(n, cls, make_rng(seed))
    assert sorted(p.values) == list(range(1, n + 1))
    assert is_separable(p)
    if n >= 2 and cls is SepClass.INDECOMPOSABLE:
        assert is_indecomposable(p) and not is_skew_indecomposable(p)
    if n >= 2 and cls is SepClass.SKEW_INDECOMPOSABLE:
        assert is_skew_indecomposable(p) and not is_indecomposable(p)


def test_large_sample_is_separable():
    p = sample_sep(5000, "all", make_rng(77))
    assert is_separable(p)


def test_first_coordinate_frequency_n60():
    rng = make_rng(42)
    reps = 20_000
    hits = sum(next(iter_sep_values(60, "all", rng)) == 1 for _ in range(reps))
    p = shared_value(59) / shared_value(60)
    assert abs(hits / reps - p) < 4 * np.sqrt(p * (1 - p) / reps)

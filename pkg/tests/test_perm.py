import itertools

import pytest
from conftest import brute_indecomposable, brute_sep, contains_pattern
from hypothesis import given, settings
from hypothesis import strategies as st

from seplimit.perm import (
    NodeKind,
    Permutation,
    build_sep_tree,
    complement,
    direct_sum,
    find_occurrence,
    first_block_minus,
    first_block_plus,
    is_indecomposable,
    is_separable,
    is_separable_by_patterns,
    is_skew_indecomposable,
    occ_count,
    parse_permutation,
    pattern_of,
    reverse,
    reverse_complement,
    skew_sum,
)


def P(text):
    return parse_permutation(text)


def test_parse_formats():
    assert P("4 3 5 2 1 6 7") == P("4352167")
    assert P("1").values == (1,)
    assert P("10 9 11").block_start == 9
    for bad in ("", "1 1", "1 3", "ab"):
        with pytest.raises(ValueError):
            P(bad)


def test_permutation_validation():
    with pytest.raises(ValueError):
        Permutation((2, 3), 1)
    with pytest.raises(ValueError):
        Permutation((), 1)
    p = Permutation((4, 2, 3), 2)
    assert p.block_end == 4
    assert p.normalized().values == (3, 1, 2)
    assert str(p) == "4 2 3"


# sums


def test_direct_sum_examples():
    assert direct_sum(P("21"), Permutation((1,))) == P("213")
    assert direct_sum(P("1"), P("1")) == P("12")
    assert direct_sum(P("43521"), P("12")) == P("4352167")
    # block-adjacent form
    assert direct_sum(P("21"), Permutation((3,), 3)) == P("213")


def test_skew_sum_examples():
    assert skew_sum(P("213"), P("21")) == P("43521")
    assert skew_sum(P("1"), P("1")) == P("21")
    assert skew_sum(skew_sum(P("1"), P("1")), P("1")) == skew_sum(P("1"), skew_sum(P("1"), P("1"))) == P("321")
    assert skew_sum(Permutation((4, 3, 5), 3), P("21")) == P("43521")


def test_sums_reject_non_adjacent_blocks():
    with pytest.raises(ValueError):
        direct_sum(Permutation((2,), 2), Permutation((5,), 5))
    with pytest.raises(ValueError):
        skew_sum(Permutation((2,), 2), Permutation((5,), 5))


# first blocks


def test_first_block_examples():
    assert first_block_plus(P("4352167")) == 5
    assert first_block_plus(P("12345")) == 1
    assert first_block_plus(P("231")) == 3
    assert first_block_minus(P("43521")) == 3
    assert first_block_minus(P("21")) == 1
    assert first_block_minus(P("4352167")) == 7


def test_first_blocks_are_block_relative():
    p = Permutation((7, 5, 6, 9, 8), 5)
    assert first_block_plus(p) == 3
    assert first_block_minus(p) == 5


@pytest.mark.parametrize("n", range(2, 8))
def test_exactly_one_half_for_separable(n):
    for p in brute_sep(n):
        assert is_indecomposable(p) != is_skew_indecomposable(p)
        assert is_indecomposable(p) == brute_indecomposable(p)


@settings(max_examples=200)
@given(st.permutations(range(1, 7)), st.permutations(range(1, 5)))
def test_first_block_of_direct_sum(a, b):
    s = direct_sum(Permutation.of(a), Permutation.of(b))
    assert first_block_plus(s) <= len(a)
    assert first_block_plus(s) == first_block_plus(Permutation.of(a))
    assert not is_indecomposable(s)


# patterns


def test_occurrence_examples():
    sigma = P("32541")
    assert pattern_of([sigma[i] for i in (0, 2, 3, 4)]) == (2, 4, 3, 1)
    assert occ_count(P("2431"), sigma) >= 1
    assert occ_count(P("21"), P("12")) == 0
    assert occ_count(P("12"), P("132")) == 2
    assert find_occurrence((2, 4, 1, 3), P("2413")) == (1, 2, 3, 4)
    assert find_occurrence((2, 1), P("123")) is None


@settings(max_examples=100)
@given(st.permutations(range(1, 8)), st.sampled_from([(1, 2), (2, 1), (1, 3, 2), (2, 4, 1, 3), (3, 1, 4, 2)]))
def test_occ_count_against_index_subsets(sigma, pi):
    brute = sum(
        1 for idx in itertools.combinations(range(len(sigma)), len(pi))
        if pattern_of([sigma[i] for i in idx]) == pi
    )
    assert occ_count(pi, sigma) == brute
    assert (find_occurrence(pi, sigma) is not None) == (brute > 0)


# separability and trees


def test_separability_examples():
    assert not is_separable(P("2413"))
    assert is_separable(P("123"))
    assert is_separable(P("4352167"))
    assert build_sep_tree(P("3142")) is None
    leaf = build_sep_tree(P("1"))
    assert leaf.kind is NodeKind.LEAF and leaf.value == 1


def test_worked_tree():
    tree = build_sep_tree(P("4352167"))
    assert tree.kind is NodeKind.DIRECT
    assert tree.children[0].flatten() == (4, 3, 5, 2, 1)
    assert tree.to_text() == "(+ (- (+ (- 4 3) 5) 2 1) 6 7)"


@pytest.mark.parametrize("n", range(1, 8))
def test_tree_and_patterns_agree_on_all_of_Sn(n):
    sep = set(brute_sep(n))
    for p in itertools.permutations(range(1, n + 1)):
        tree = build_sep_tree(p)
        assert (tree is not None) == (p in sep)
        assert is_separable_by_patterns(p) == (p in sep)
        if tree is not None:
            assert tree.flatten() == p


def _check_canonical(tree):
    stack = [tree]
    while stack:
        node = stack.pop()
        if node.kind is NodeKind.LEAF:
            continue
        assert len(node.children) >= 2
        blocks = [sorted(c.flatten()) for c in node.children]
        for a, b in zip(blocks, blocks[1:]):
            if node.kind is NodeKind.DIRECT:
                assert a[-1] + 1 == b[0]
            else:
                assert b[-1] + 1 == a[0]
        for c in node.children:
            assert c.kind is not node.kind
            stack.append(c)


def test_canonical_form_on_S8_separables():
    for p in brute_sep(8)[::7]:
        _check_canonical(build_sep_tree(p))


def test_deep_tree_is_iterative():
    n = 3_000  # well past the default recursion limit; worst case is quadratic
    zigzag = []
    lo, hi = 1, n
    # alternating direct/skew nesting of depth ~n
    for i in range(n):
        if i % 2 == 0:
            zigzag.append(lo)
            lo += 1
        else:
            zigzag.append(hi)
            hi -= 1
    tree = build_sep_tree(zigzag)
    assert tree is not None and tree.flatten() == tuple(zigzag)


# symmetries


def test_symmetry_examples():
    assert reverse(P("123")) == P("321")
    assert complement(P("21")) == P("12")


def test_symmetries_commute_on_S5():
    for p in itertools.permutations(range(1, 6)):
        p = Permutation(p)
        assert reverse_complement(p) == reverse(complement(p)) == complement(reverse(p))


@pytest.mark.parametrize("n", range(1, 8))
def test_symmetries_are_bijections_of_sep(n):
    sep = set(brute_sep(n))
    for f in (reverse, complement, reverse_complement):
        image = {f(Permutation(p)).values for p in sep}
        assert image == sep


def test_brute_oracle_self_check():
    assert contains_pattern((2, 4, 1, 3), (2, 4, 1, 3))
    assert not contains_pattern((1, 2, 3, 4), (2, 1))

"""Permutations of integer blocks, sums, first blocks, patterns and separating trees."""

from __future__ import annotations

import enum
from collections.abc import Iterator, Sequence
from dataclasses import dataclass

__all__ = [
    "Permutation",
    "NodeKind",
    "SepTree",
    "build_sep_tree",
    "complement",
    "direct_sum",
    "find_occurrence",
    "first_block_minus",
    "first_block_plus",
    "is_indecomposable",
    "is_separable",
    "is_separable_by_patterns",
    "is_skew_indecomposable",
    "occ_count",
    "parse_permutation",
    "pattern_of",
    "reverse",
    "reverse_complement",
    "skew_sum",
]


@dataclass(frozen=True)
class Permutation:
    """A bijection from positions 1..len onto the block [block_start, block_start+len-1]."""

    values: tuple[int, ...]
    block_start: int = 1

    def __post_init__(self) -> None:
        vals = tuple(int(v) for v in self.values)
        object.__setattr__(self, "values", vals)
        if not vals:
            raise ValueError("a permutation needs at least one entry")
        if self.block_start < 1:
            raise ValueError("block_start must be >= 1")
        if min(vals) != self.block_start or max(vals) != self.block_start + len(vals) - 1:
            raise ValueError(f"{vals} is not a permutation of a block starting at {self.block_start}")
        if len(set(vals)) != len(vals):
            raise ValueError(f"{vals} has repeated values")

    @classmethod
    def of(cls, values: Sequence[int]) -> Permutation:
        """Build from values, taking the block start from the minimum."""
        vals = tuple(values)
        return cls(vals, min(vals) if vals else 1)

    def __len__(self) -> int:
        return len(self.values)

    def __iter__(self) -> Iterator[int]:
        return iter(self.values)

    def __getitem__(self, i):
        return self.values[i]

    @property
    def block_end(self) -> int:
        return self.block_start + len(self.values) - 1

    def shifted(self, new_start: int) -> Permutation:
        """The same pattern placed on the block starting at ``new_start``."""
        d = new_start - self.block_start
        return Permutation(tuple(v + d for v in self.values), new_start)

    def normalized(self) -> Permutation:
        return self.shifted(1)

    def __str__(self) -> str:
        return " ".join(map(str, self.values))


def parse_permutation(text: str) -> Permutation:
    """Parse ``"4 3 5 2 1 6 7"`` or, for single-digit values, ``"4352167"``."""
    text = text.strip()
    if not text:
        raise ValueError("empty permutation")
    parts = text.replace(",", " ").split()
    if len(parts) == 1 and len(parts[0]) > 1:
        if not parts[0].isdigit():
            raise ValueError(f"cannot parse permutation {text!r}")
        parts = list(parts[0])
    try:
        return Permutation.of([int(p) for p in parts])
    except ValueError as exc:
        raise ValueError(f"cannot parse permutation {text!r}: {exc}") from None


def _as_perm(p: Permutation | Sequence[int]) -> Permutation:
    return p if isinstance(p, Permutation) else Permutation.of(p)


# --------------------------------------------------------------------------
# sums


def direct_sum(sigma: Permutation, tau: Permutation) -> Permutation:
    """``sigma ⊕ tau``: tau placed after and above sigma.

    Either ``tau`` sits on the block right above ``sigma``, or both are given
    in standard form (block start 1) and ``tau`` is relabelled as in the
    usual definition.
    """
    sigma, tau = _as_perm(sigma), _as_perm(tau)
    if tau.block_start == sigma.block_end + 1:
        return Permutation(sigma.values + tau.values, sigma.block_start)
    if sigma.block_start == 1 and tau.block_start == 1:
        k = len(sigma)
        return Permutation(sigma.values + tuple(v + k for v in tau.values), 1)
    raise ValueError(
        f"direct sum needs tau on block {sigma.block_end + 1}.. or both in standard form"
    )


def skew_sum(sigma: Permutation, tau: Permutation) -> Permutation:
    """``sigma ⊖ tau``: tau placed after and below sigma."""
    sigma, tau = _as_perm(sigma), _as_perm(tau)
    if sigma.block_start == tau.block_end + 1:
        return Permutation(sigma.values + tau.values, tau.block_start)
    if sigma.block_start == 1 and tau.block_start == 1:
        l = len(tau)
        return Permutation(tuple(v + l for v in sigma.values) + tau.values, 1)
    raise ValueError(
        f"skew sum needs sigma on block {tau.block_end + 1}.. or both in standard form"
    )


# --------------------------------------------------------------------------
# first blocks


def first_block_plus(sigma: Permutation | Sequence[int]) -> int:
    """Shortest prefix length j whose values are the lowest j of the block."""
    sigma = _as_perm(sigma)
    hi = sigma.block_start - 1
    for j, v in enumerate(sigma.values, 1):
        if v > hi:
            hi = v
        if hi == sigma.block_start + j - 1:
            return j
    raise AssertionError("unreachable")


def first_block_minus(sigma: Permutation | Sequence[int]) -> int:
    """Shortest prefix length k whose values are the top k of the block."""
    sigma = _as_perm(sigma)
    lo = sigma.block_end + 1
    for k, v in enumerate(sigma.values, 1):
        if v < lo:
            lo = v
        if lo == sigma.block_end - k + 1:
            return k
    raise AssertionError("unreachable")


def is_indecomposable(sigma: Permutation | Sequence[int]) -> bool:
    sigma = _as_perm(sigma)
    return first_block_plus(sigma) == len(sigma)


def is_skew_indecomposable(sigma: Permutation | Sequence[int]) -> bool:
    sigma = _as_perm(sigma)
    return first_block_minus(sigma) == len(sigma)


# --------------------------------------------------------------------------
# patterns


def pattern_of(values: Sequence[int]) -> tuple[int, ...]:
    """Order-isomorphic reduction onto 1..len (``pat`` of a subsequence)."""
    order = sorted(range(len(values)), key=values.__getitem__)
    out = [0] * len(values)
    for rank, i in enumerate(order, 1):
        out[i] = rank
    return tuple(out)


def _occurrences(pattern: Sequence[int], seq: Sequence[int]) -> Iterator[tuple[int, ...]]:
    k, n = len(pattern), len(seq)
    if k == 0 or k > n:
        return
    chosen: list[int] = []

    def rec(start: int, depth: int) -> Iterator[tuple[int, ...]]:
        if depth == k:
            yield tuple(chosen)
            return
        p = pattern[depth]
        for i in range(start, n - (k - depth) + 1):
            v = seq[i]
            if all((seq[c] < v) == (pattern[d] < p) for d, c in enumerate(chosen)):
                chosen.append(i)
                yield from rec(i + 1, depth + 1)
                chosen.pop()

    yield from rec(0, 0)


def occ_count(pi: Permutation | Sequence[int], sigma: Permutation | Sequence[int]) -> int:
    """Number of index sets I with ``pat(sigma_I) == pi``."""
    pi = pattern_of(tuple(pi))
    return sum(1 for _ in _occurrences(pi, tuple(sigma)))


def find_occurrence(
    pi: Permutation | Sequence[int], sigma: Permutation | Sequence[int]
) -> tuple[int, ...] | None:
    """First occurrence of ``pi`` in ``sigma`` as 1-based positions, or None."""
    pi = pattern_of(tuple(pi))
    for occ in _occurrences(pi, tuple(sigma)):
        return tuple(i + 1 for i in occ)
    return None


def is_separable_by_patterns(sigma: Permutation | Sequence[int]) -> bool:
    """Separability as avoidance of 2413 and 3142."""
    seq = tuple(sigma)
    return find_occurrence((2, 4, 1, 3), seq) is None and find_occurrence((3, 1, 4, 2), seq) is None


# --------------------------------------------------------------------------
# separating trees


class NodeKind(enum.Enum):
    LEAF = "leaf"
    DIRECT = "+"
    SKEW = "-"


@dataclass(frozen=True)
class SepTree:
    kind: NodeKind
    children: tuple[SepTree, ...] = ()
    value: int | None = None

    @classmethod
    def leaf(cls, value: int) -> SepTree:
        return cls(NodeKind.LEAF, (), value)

    def flatten(self) -> tuple[int, ...]:
        out: list[int] = []
        stack = [self]
        while stack:
            node = stack.pop()
            if node.kind is NodeKind.LEAF:
                out.append(node.value)
            else:
                stack.extend(reversed(node.children))
        return tuple(out)

    def to_text(self) -> str:
        """Nested brackets, e.g. ``(+ (- 2 1) 3)`` for 213."""
        if self.kind is NodeKind.LEAF:
            return str(self.value)
        return "(" + self.kind.value + " " + " ".join(c.to_text() for c in self.children) + ")"

    def __str__(self) -> str:
        return self.to_text()


def _split_points(vals: Sequence[int], lo: int, hi: int) -> tuple[NodeKind, list[int]] | None:
    seg = vals[lo:hi]
    vmin, vmax = min(seg), max(seg)
    direct, skew = [], []
    run_max, run_min = vmin - 1, vmax + 1
    for p in range(1, hi - lo):
        v = seg[p - 1]
        run_max = max(run_max, v)
        run_min = min(run_min, v)
        if run_max == vmin + p - 1:
            direct.append(lo + p)
        if run_min == vmax - p + 1:
            skew.append(lo + p)
    if direct:
        return NodeKind.DIRECT, direct
    if skew:
        return NodeKind.SKEW, skew
    return None


def build_sep_tree(sigma: Permutation | Sequence[int]) -> SepTree | None:
    """Canonical separating tree, or None when sigma is not separable.

    Every internal node is split at all of its direct (resp. skew) cut
    points, so direct and skew nodes alternate down the tree. Iterative, so
    deep trees are fine.
    """
    vals = tuple(sigma)
    done: dict[tuple[int, int], SepTree] = {}
    pending: dict[tuple[int, int], tuple[NodeKind, list[tuple[int, int]]]] = {}
    stack: list[tuple[int, int, bool]] = [(0, len(vals), False)]
    while stack:
        lo, hi, expanded = stack.pop()
        if hi - lo == 1:
            done[(lo, hi)] = SepTree.leaf(vals[lo])
            continue
        if expanded:
            kind, segs = pending.pop((lo, hi))
            done[(lo, hi)] = SepTree(kind, tuple(done.pop(s) for s in segs))
            continue
        split = _split_points(vals, lo, hi)
        if split is None:
            return None
        kind, cuts = split
        bounds = [lo, *cuts, hi]
        segs = list(zip(bounds, bounds[1:]))
        pending[(lo, hi)] = (kind, segs)
        stack.append((lo, hi, True))
        stack.extend((a, b, False) for a, b in segs)
    return done[(0, len(vals))]


def is_separable(sigma: Permutation | Sequence[int]) -> bool:
    return build_sep_tree(sigma) is not None


# --------------------------------------------------------------------------
# symmetries (block-relative)


def reverse(sigma: Permutation) -> Permutation:
    sigma = _as_perm(sigma)
    return Permutation(sigma.values[::-1], sigma.block_start)


def complement(sigma: Permutation) -> Permutation:
    sigma = _as_perm(sigma)
    s = sigma.block_start + sigma.block_end
    return Permutation(tuple(s - v for v in sigma.values), sigma.block_start)


def reverse_complement(sigma: Permutation) -> Permutation:
    return reverse(complement(sigma))

"""Exact-uniform sampling and a quick uniformity check on SEP(5).

Run: python demos/02_uniform_sampling.py
"""
from collections import Counter

import numpy as np
from scipy import stats

from seplimit._rng import make_rng
from seplimit.perm import build_sep_tree, is_indecomposable
from seplimit.sampler import enumerate_sep, iter_sep_values, sample_sep

rng = make_rng(7)

for n in (8, 20):
    p = sample_sep(n, "all", rng)
    print(f"n={n}: {p}\n   tree {build_sep_tree(p)}")

q = sample_sep(12, "indec", rng)
print("indecomposable draw:", q, is_indecomposable(q))

# Uniformity: 90 elements, 90 000 draws.
elems = [p.values for p in enumerate_sep(5)]
counts = Counter(sample_sep(5, "all", rng).values for _ in range(90_000))
obs = np.array([counts[e] for e in elems])
print("SEP(5) counts min/max:", obs.min(), obs.max(), " chi-square p =", stats.chisquare(obs).pvalue)

# Large n is cheap, and the lazy sampler only pays for the prefix it reads.
big = sample_sep(10_000, "all", rng)
print("n=10000 first values:", big.values[:10])
it = iter_sep_values(20_000, "all", rng)
print("lazy prefix at n=20000:", [next(it) for _ in range(8)])

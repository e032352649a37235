"""Counting separable permutations and reading their decomposition trees.

Run: python demos/01_counting_and_trees.py
"""
import math

from seplimit.perm import build_sep_tree, find_occurrence, parse_permutation
from seplimit.schroeder import RHO, asymptotic_ratio, compute_table, convolution_table

# The first few big Schröder numbers, from both recurrences.
table = compute_table(2000)
print("s_1..s_10:", table.values[:10])
print("convolution recurrence agrees:", convolution_table(10).values == table.values[:10])

# Growth: s_n behaves like rho^-n n^(-3/2). The two-term printed estimate
# leaves a constant factor; watch the ratio settle.
for n in (10, 100, 1000, 2000):
    print(f"n={n:5d}  s_n / estimate = {asymptotic_ratio(n, table):.5f}")
print(f"2^(1/4) = {2 ** 0.25:.5f}")

# The first value of a uniform permutation is 1 with probability s_{n-1}/s_n.
for n in (10, 100, 2000):
    print(f"s_{n - 1}/s_{n} = {table[n - 1] / table[n]:.6f}")
print(f"3 - 2 sqrt 2   = {RHO:.6f}")

# A worked decomposition.
sigma = parse_permutation("4352167")
tree = build_sep_tree(sigma)
print(sigma, "->", tree)
for word in ("2413", "25314"):
    p = parse_permutation(word)
    print(word, "separable:", build_sep_tree(p) is not None,
          "| 2413 at", find_occurrence((2, 4, 1, 3), p), "| 3142 at", find_occurrence((3, 1, 4, 2), p))

print("digits of s_2000:", len(str(table[2000])), "~", round(2000 * math.log10(1 / RHO)))

"""Big Schröder numbers s_n = |SEP(n)| and everything derived from them.

Counts are kept as Python ints end to end. The generating function
``s(x) = (1 - x - sqrt(x^2 - 6x + 1)) / 2`` is evaluated on the closed disk
``|x| <= 3 - 2*sqrt(2)``, and the exact tail masses ``sum_{n>J} s_n rho^n``
come from a convergent expansion of the same function around its
singularity, which is what the heavy-tailed laws in :mod:`seplimit.limitlaw`
use beyond their finite tables.
"""

from __future__ import annotations

import cmath
import math
import os
import random
import sys
import threading
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import mpmath

__all__ = [
    "RHO",
    "SQRT2",
    "BlockLawWeights",
    "OutOfDomainError",
    "SchroederTable",
    "asymptotic_estimate",
    "asymptotic_ratio",
    "block_law",
    "compute_table",
    "convolution_table",
    "gen_func_eval",
    "gen_func_on_circle",
    "get_table",
    "install_table",
    "load_table",
    "log_asymptotic_estimate",
    "save_table",
    "scaled_tail_sum",
    "shared_value",
]

SQRT2 = math.sqrt(2.0)
#: Radius of convergence of s(x); also the smaller root of x^2 - 6x + 1.
RHO = 3.0 - 2.0 * SQRT2

CACHE_HEADER = "sep-limit schroeder v1"
DEFAULT_TABLE_BOUND = 20_000
_CROSS_CHECK_BOUND = 64
_DOMAIN_SLACK = 1e-12


class OutOfDomainError(ValueError):
    """A numeric routine was asked to leave its domain of validity."""


@dataclass(frozen=True)
class SchroederTable:
    """Exact values s_1..s_max_n, indexed from 1."""

    values: tuple[int, ...]

    @property
    def max_n(self) -> int:
        return len(self.values)

    def __getitem__(self, n: int) -> int:
        if not 1 <= n <= len(self.values):
            raise IndexError(f"s_{n} outside table range 1..{self.max_n}")
        return self.values[n - 1]

    def __len__(self) -> int:
        return len(self.values)

    def prefix(self, n: int) -> SchroederTable:
        if not 1 <= n <= self.max_n:
            raise ValueError(f"prefix length {n} outside 1..{self.max_n}")
        return SchroederTable(self.values[:n])


def _check_bound(n_max: int) -> None:
    if isinstance(n_max, bool) or not isinstance(n_max, int):
        raise TypeError("n_max must be an int")
    if n_max < 1:
        raise ValueError(f"n_max must be >= 1, got {n_max}")


def convolution_table(n_max: int) -> SchroederTable:
    """s_1..s_n_max from ``s_n = 2 s_{n-1} + sum_{j=2}^{n-1} s_j s_{n-j}``.

    Quadratic; used as the reference for :func:`compute_table`.
    """
    _check_bound(n_max)
    s = [0, 1]
    for n in range(2, n_max + 1):
        s.append(2 * s[n - 1] + sum(s[j] * s[n - j] for j in range(2, n)))
    return SchroederTable(tuple(s[1:]))


def _extend_three_term(s: list[int], n_max: int) -> None:
    # s[0] is a placeholder; (n+1) s_{n+1} = 3(2n-1) s_n - (n-2) s_{n-1}
    while len(s) <= n_max:
        n = len(s) - 1
        num = 3 * (2 * n - 1) * s[n] - (n - 2) * s[n - 1]
        q, r = divmod(num, n + 1)
        if r:
            raise ArithmeticError(f"three-term recurrence not exact at n={n + 1}")
        s.append(q)


def compute_table(n_max: int) -> SchroederTable:
    """Exact s_1..s_n_max.

    Uses the linear three-term recurrence and cross-checks the first 64
    entries against the convolution recurrence.
    """
    _check_bound(n_max)
    s = [0, 1, 2]
    _extend_three_term(s, n_max)
    values = tuple(s[1 : n_max + 1])
    m = min(n_max, _CROSS_CHECK_BOUND)
    if convolution_table(m).values != values[:m]:
        raise ArithmeticError("recurrences disagree")
    return SchroederTable(values)


_table_lock = threading.Lock()
_shared: list[int] = [0, 1, 2]


def get_table(n: int = DEFAULT_TABLE_BOUND) -> SchroederTable:
    """Process-wide table covering at least ``n``; grows by doubling."""
    _check_bound(n)
    with _table_lock:
        if len(_shared) <= n:
            target = max(n, 2 * (len(_shared) - 1), _CROSS_CHECK_BOUND)
            _extend_three_term(_shared, target)
        return SchroederTable(tuple(_shared[1:]))


def install_table(table: SchroederTable) -> None:
    """Seed the process-wide table from ``table`` (e.g. a loaded cache)."""
    with _table_lock:
        k = min(table.max_n, len(_shared) - 1)
        if table.values[:k] != tuple(_shared[1 : k + 1]):
            raise ValueError("table disagrees with the values already computed")
        if table.max_n >= len(_shared):
            _shared[:] = [0, *table.values]


def shared_value(n: int) -> int:
    """s_n from the process-wide table without copying it."""
    if n >= len(_shared):
        get_table(n)
    return _shared[n]


# --------------------------------------------------------------------------
# cache file


def save_table(table: SchroederTable, path: str | os.PathLike) -> None:
    """Write ``sep-limit schroeder v1 <max_n>`` then one decimal per line."""
    _allow_long_ints()
    tmp = f"{os.fspath(path)}.tmp"
    with open(tmp, "w", encoding="ascii") as fh:
        fh.write(f"{CACHE_HEADER} {table.max_n}\n")
        for v in table.values:
            fh.write(str(v))
            fh.write("\n")
    os.replace(tmp, path)


def load_table(path: str | os.PathLike, *, rng: random.Random | None = None) -> SchroederTable:
    """Read a cache file, validating s_1, s_2 and 16 random recurrence checks."""
    _allow_long_ints()
    with open(path, encoding="ascii") as fh:
        header = fh.readline().split()
        if len(header) != 4 or " ".join(header[:3]) != CACHE_HEADER:
            raise ValueError(f"{path}: not a sep-limit schroeder v1 cache")
        max_n = int(header[3])
        values = [int(line) for line in fh if line.strip()]
    if len(values) != max_n or max_n < 1:
        raise ValueError(f"{path}: header says {max_n} values, found {len(values)}")
    if values[0] != 1 or (max_n >= 2 and values[1] != 2):
        raise ValueError(f"{path}: bad initial values")
    s = [0, *values]
    rng = rng or random.Random(0x5E9)
    if max_n >= 3:
        for n in (rng.randint(3, max_n) for _ in range(16)):
            if s[n] != 2 * s[n - 1] + sum(s[j] * s[n - j] for j in range(2, n)):
                raise ValueError(f"{path}: s_{n} fails the convolution recurrence")
    return SchroederTable(tuple(values))


def _allow_long_ints() -> None:
    if hasattr(sys, "set_int_max_str_digits"):
        sys.set_int_max_str_digits(0)


# --------------------------------------------------------------------------
# generating function


def _radicand(z: complex) -> complex:
    # (z - rho)(z - 1/rho) == z^2 - 6z + 1, better conditioned near rho
    return (z - RHO) * (z - 1.0 / RHO)


def gen_func_eval(z: complex) -> complex:
    """s(z) for ``|z| <= 3 - 2*sqrt(2)``.

    The principal square root is used; on the closed disk the radicand has
    non-negative real part, which is asserted.
    """
    z = complex(z)
    if abs(z) > RHO + _DOMAIN_SLACK:
        raise OutOfDomainError(f"|z| = {abs(z):.17g} exceeds 3 - 2*sqrt(2)")
    rad = _radicand(z)
    if rad.real < -_DOMAIN_SLACK:
        raise OutOfDomainError(f"radicand {rad} left the right half plane")
    return 0.5 * (1.0 - z - cmath.sqrt(complex(max(rad.real, 0.0), rad.imag)))


def _circle_radicand(theta: float) -> complex:
    a = RHO
    u = 2.0 * math.sin(0.5 * theta) ** 2  # 1 - cos(theta) without cancellation
    re = u * (6.0 * a - 4.0 * a * a) + 2.0 * a * a * u * u
    im = math.sin(theta) * (6.0 * a - 2.0 * a * a * math.cos(theta))
    return complex(re, im)


def gen_func_on_circle(theta: float) -> complex:
    """s(rho * exp(-i*theta)) on the boundary circle.

    The radicand is expanded in ``1 - cos(theta)`` so that it stays accurate
    when ``theta`` is tiny, as in the scaled characteristic functions.
    """
    rad = _circle_radicand(theta)
    if rad.real < 0.0:
        raise OutOfDomainError(f"radicand {rad} left the right half plane at theta={theta}")
    z = RHO * cmath.exp(-1j * theta)
    return 0.5 * (1.0 - z - cmath.sqrt(rad))


# --------------------------------------------------------------------------
# asymptotics


def log_asymptotic_estimate(n: int) -> float:
    """Natural log of ``rho^(-n + 1/2) / (2 sqrt(pi n^3))``."""
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    return (
        -math.log(2.0)
        - 0.5 * math.log(math.pi)
        - 1.5 * math.log(n)
        + (0.5 - n) * math.log(RHO)
    )


def asymptotic_estimate(n: int) -> float:
    """``rho^(-n + 1/2) / (2 sqrt(pi n^3))`` as a float.

    Overflows past n ~ 400; use :func:`log_asymptotic_estimate` or
    :func:`asymptotic_ratio` there.
    """
    return math.exp(log_asymptotic_estimate(n))


def asymptotic_ratio(n: int, table: SchroederTable | None = None) -> float:
    """s_n divided by :func:`asymptotic_estimate`, computed in log space."""
    s_n = table[n] if table is not None else shared_value(n)
    return math.exp(math.log(s_n) - log_asymptotic_estimate(n))


# Expansion of s(x) in w = 1 - x/rho:  s(x) = (1-x)/2 - K sum_k C(1/2,k) c^k w^(k+1/2)
# with K = sqrt(1 - rho^2)/2 and c = rho/(1/rho - rho). It converges on |x| <= rho,
# and [x^n] w^(k+1/2) = rho^-n Gamma(n-k-1/2) / (Gamma(-k-1/2) Gamma(n+1)).


@lru_cache(maxsize=None)
def _tail_coefficients(terms: int, dps: int) -> tuple[mpmath.mpf, ...]:
    with mpmath.workdps(dps):
        a = 3 - 2 * mpmath.sqrt(2)
        c = a / (1 / a - a)
        k0 = -mpmath.sqrt(1 - a * a) / 2
        out = []
        for k in range(terms):
            beta = -k - mpmath.mpf(1) / 2
            out.append(k0 * mpmath.binomial(mpmath.mpf(1) / 2, k) * c**k / mpmath.gamma(beta) / (k + mpmath.mpf(1) / 2))
        return tuple(out)


def scaled_tail_sum(J: int, *, terms: int = 40, dps: int = 30) -> float:
    """``sum_{n > J} s_n rho^n`` for J >= 1, to double precision.

    Uses ``sum_{n>=N} Gamma(n+b)/Gamma(n+1) = Gamma(N+b) / (-b Gamma(N))``
    termwise on the singular expansion.
    """
    if J < 1:
        raise ValueError("J must be >= 1")
    coeffs = _tail_coefficients(terms, dps)
    with mpmath.workdps(dps):
        total = mpmath.mpf(0)
        for k, g in enumerate(coeffs):
            beta = -k - mpmath.mpf(1) / 2
            total += g * mpmath.gammaprod([J + 1 + beta], [J + 1])
        return float(total)


# --------------------------------------------------------------------------
# first-block law


@dataclass(frozen=True)
class BlockLawWeights:
    """Law of the first (skew) indecomposable block length given ``< n``.

    ``weights[j - 1]`` is the probability of length ``j``; ``numerators`` are
    the same weights scaled by ``s_n`` (so they sum to ``s_n`` exactly).
    """

    n: int
    numerators: tuple[int, ...]
    total: int

    @property
    def weights(self) -> tuple[Fraction, ...]:
        return tuple(Fraction(w, self.total) for w in self.numerators)

    def weight(self, j: int) -> Fraction:
        return Fraction(self.numerators[j - 1], self.total)

    def complementary(self) -> tuple[Fraction, ...]:
        """Law of ``n - |B_1|``: entry ``k - 1`` is the weight of length ``n - k``."""
        return tuple(reversed(self.weights))


def block_law(n: int, table: SchroederTable | None = None) -> BlockLawWeights:
    table = table if table is not None else get_table(n)
    if not 2 <= n <= table.max_n:
        raise ValueError(f"block_law needs 2 <= n <= {table.max_n}, got {n}")
    nums = [2 * table[n - 1]] + [table[j] * table[n - j] for j in range(2, n)]
    return BlockLawWeights(n, tuple(nums), table[n])

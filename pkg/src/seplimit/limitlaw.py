"""The limit of uniform separable permutations as a random element of S(N, N*).

The limiting object is a regenerative concatenation: each cycle discards a
block of small values, then lays down either a uniform indecomposable
separable permutation of the next block or a run of infinities. Two prefix
samplers are provided:

``THEOREM``
    chi, N, R_m and L drawn mutually independently.
``MECHANISM``
    the four-state chain (+F), (-F), (+I), (-I) run once per cycle; every
    arrival at (-I) discards an R-block, (+F) lays a permutation piece and
    (-F) a run of infinities, each of length L.

The two induce different joint laws of (piece kind, discard count);
:func:`compare_prefix_laws` measures both against exact finite-n samples.
"""

from __future__ import annotations

import enum
import math
import threading
from collections import Counter
from collections.abc import Sequence
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

import mpmath
import numpy as np

from ._rng import make_rng
from .perm import Permutation
from .sampler import SepClass, iter_sep_values
from .schroeder import (
    RHO,
    SQRT2,
    _tail_coefficients,
    gen_func_eval,
    scaled_tail_sum,
    shared_value,
)

__all__ = [
    "INF",
    "Law",
    "Mode",
    "CycleState",
    "LimitPiece",
    "PrefixWindow",
    "LimitSampler",
    "compare_prefix_laws",
    "embed_finite",
    "joint_tilde_check",
    "law_total_mass",
    "mean_N",
    "metric_S",
    "metric_nstar",
    "pmf",
    "ratio_stats",
    "sample",
    "sample_limit_prefix",
]

INF = math.inf

#: P(L finite limit) and P(R finite limit) normalisers.
L_MASS = 2.0 - SQRT2
R_MASS = SQRT2 - 1.0

DEFAULT_CAP = 20_000
_HEAD_START = 256
_HEAD_MAX = 16_384
_MP_DPS = 30


class Law(enum.Enum):
    CHI = "chi"
    N = "N"
    R = "R"
    L = "L"
    TILDE_L = "tilde_L"
    TILDE_R = "tilde_R"


class Mode(enum.Enum):
    THEOREM = "theorem"
    MECHANISM = "mechanism"

    @classmethod
    def parse(cls, text: str | Mode) -> Mode:
        return text if isinstance(text, cls) else cls(text.lower())


class CycleState(enum.Enum):
    PLUS_F = "+F"
    MINUS_F = "-F"
    PLUS_I = "+I"
    MINUS_I = "-I"


#: Initial distribution of the cycle chain, in CycleState order.
INITIAL_STATE_PROBS = (0.5 * (2 - SQRT2), 0.5 * (2 - SQRT2), 0.5 * (SQRT2 - 1), 0.5 * (SQRT2 - 1))
#: From (+I) to (-F), and from (-I) to (+F).
P_TO_FINITE = 2.0 - SQRT2


# --------------------------------------------------------------------------
# pmfs


@lru_cache(maxsize=65_536)
def scaled_count(j: int) -> float:
    """``s_j * rho^j`` to full double precision."""
    if j < 1:
        raise ValueError("j must be >= 1")
    with mpmath.workdps(_MP_DPS):
        rho = 3 - 2 * mpmath.sqrt(2)
        return float(mpmath.mpf(shared_value(j)) * rho**j)


def pmf(law: Law | str, j: int | float) -> float:
    """Probability of the atom ``j`` (``INF`` allowed for the tilde laws)."""
    law = Law(law)
    if j == INF:
        return {Law.TILDE_L: SQRT2 - 1.0, Law.TILDE_R: 2.0 - SQRT2}.get(law, 0.0)
    if j != int(j):
        return 0.0
    j = int(j)
    if law is Law.CHI:
        return 0.5 if j in (0, 1) else 0.0
    if law is Law.N:
        if j < 0:
            return 0.0
        return SQRT2 / 2 if j == 0 else SQRT2 * RHO**j
    if j < 1:
        return 0.0
    if law is Law.R:
        return scaled_count(j) / R_MASS
    if law is Law.L:
        return (2 * RHO if j == 1 else scaled_count(j)) / L_MASS
    if law is Law.TILDE_L:
        return 2 * RHO if j == 1 else scaled_count(j)
    # TILDE_R finite atoms are s_k rho^k, the marginal of the joint (L~, R~) law
    return scaled_count(j)


def law_total_mass(law: Law | str) -> float:
    """Total mass from the generating-function identities.

    ``sum_j s_j rho^j = s(rho)`` is evaluated with :func:`gen_func_eval`.
    """
    law = Law(law)
    s_rho = gen_func_eval(RHO).real
    if law is Law.CHI:
        return 1.0
    if law is Law.N:
        return SQRT2 / 2 + SQRT2 * RHO / (1 - RHO)
    if law is Law.R:
        return s_rho / R_MASS
    if law is Law.L:
        return (RHO + s_rho) / L_MASS
    if law is Law.TILDE_L:
        return RHO + s_rho + (SQRT2 - 1)
    return s_rho + (2 - SQRT2)


def mean_N(tol: float = 1e-18) -> float:
    """``E N`` by summing the series until the terms drop below ``tol``."""
    terms = []
    j = 1
    while True:
        term = j * SQRT2 * RHO**j
        terms.append(term)
        if term < tol:
            break
        j += 1
    return math.fsum(terms)


def joint_tilde_check() -> dict:
    """Check the joint law of (L~, R~) against its two marginals.

    The joint law puts ``2 rho`` / ``s_j rho^j`` on ``(j, inf)``,
    ``s_k rho^k`` on ``(inf, k)`` and nothing on ``(inf, inf)``.
    """
    s_rho = gen_func_eval(RHO).real
    joint_inf_inf = 0.0
    # marginal of L~: finite atoms come straight from the (j, inf) row,
    # the atom at inf collects the whole (inf, k) row
    l_inf = s_rho
    r_inf = RHO + s_rho  # = 2 rho + sum_{j>=2} s_j rho^j
    l_total = (RHO + s_rho) + l_inf
    r_total = s_rho + r_inf
    report = {
        "joint_inf_inf": joint_inf_inf,
        "joint_1_inf": 2 * RHO,
        "marginal_L_inf": l_inf,
        "marginal_R_inf": r_inf,
        "marginal_L_total": l_total,
        "marginal_R_total": r_total,
        "L_inf_matches": abs(l_inf - pmf(Law.TILDE_L, INF)) <= 1e-12,
        "R_inf_matches": abs(r_inf - pmf(Law.TILDE_R, INF)) <= 1e-12,
        "finite_atoms_match": all(
            abs((2 * RHO if j == 1 else scaled_count(j)) - pmf(Law.TILDE_L, j)) <= 1e-15
            and abs(scaled_count(j) - pmf(Law.TILDE_R, j)) <= 1e-15
            for j in range(1, 64)
        ),
    }
    report["ok"] = (
        report["L_inf_matches"]
        and report["R_inf_matches"]
        and report["finite_atoms_match"]
        and abs(l_total - 1) <= 1e-12
        and abs(r_total - 1) <= 1e-12
    )
    return report


# --------------------------------------------------------------------------
# heavy-tailed laws: exact head table, analytic tail


@lru_cache(maxsize=1)
def _gamma_ratio_coefficients(terms: int, order: int) -> np.ndarray:
    # log Gamma(x+b) - log Gamma(x) = b log x + sum_m (-1)^(m+1) (B_{m+1}(b) - B_{m+1}(0)) / (m(m+1) x^m)
    out = np.zeros((terms, order))
    with mpmath.workdps(_MP_DPS):
        for k in range(terms):
            b = -k - mpmath.mpf(1) / 2
            for m in range(1, order + 1):
                num = mpmath.bernpoly(m + 1, b) - mpmath.bernpoly(m + 1, 0)
                out[k, m - 1] = float((-1) ** (m + 1) * num / (m * (m + 1)))
    return out


def _scaled_tail_vec(J: np.ndarray, terms: int = 8, order: int = 8) -> np.ndarray:
    """Vectorised ``sum_{n > J} s_n rho^n`` for J >= 1024."""
    x = np.asarray(J, dtype=float) + 1.0
    g = np.array([float(c) for c in _tail_coefficients(40, _MP_DPS)[:terms]])
    bern = _gamma_ratio_coefficients(terms, order)
    logx = np.log(x)
    inv = 1.0 / x
    total = np.zeros_like(x)
    for k in range(terms):
        b = -k - 0.5
        corr = np.zeros_like(x)
        for m in range(order, 0, -1):
            corr = (corr + bern[k, m - 1]) * inv
        total += g[k] * np.exp(b * logx + corr)
    return total


class _HeavyLaw:
    """Inversion sampler for L or R.

    The survival function is tabulated exactly on 0..J from the head pmf
    plus the analytic tail mass beyond J. J doubles (up to 16384) when a
    draw lands past it; beyond that the tail is inverted analytically.
    """

    def __init__(self, first_atom: float, mass: float):
        self.first_atom = first_atom
        self.mass = mass
        self._lock = threading.Lock()
        self._build(_HEAD_START)

    def _atom(self, j: int) -> float:
        return self.first_atom if j == 1 else scaled_count(j)

    def _build(self, J: int) -> None:
        p = np.array([self._atom(j) for j in range(1, J + 1)]) / self.mass
        tail = scaled_tail_sum(J) / self.mass
        # survival S[j] = P(X > j), accumulated from the small end of the tail
        surv = np.empty(J + 1)
        surv[J] = tail
        surv[:J] = tail + np.cumsum(p[::-1])[::-1]
        self.J = J
        self.pmf = p
        self.survival = surv
        self._neg_surv = -surv

    def total_mass_check(self) -> float:
        """``P(X >= 1)`` as head sum plus analytic tail; should be 1."""
        return float(self.survival[0])

    def ensure_head(self, J: int) -> None:
        with self._lock:
            target = self.J
            while target < min(J, _HEAD_MAX):
                target *= 2
            if target > self.J:
                self._build(min(target, _HEAD_MAX))

    def tail_survival(self, j: np.ndarray) -> np.ndarray:
        return _scaled_tail_vec(j) / self.mass

    def _invert_tail(self, v: np.ndarray) -> np.ndarray:
        # smallest j > J with S(j) < v, for v < S(J)
        g0 = float(_tail_coefficients(40, _MP_DPS)[0]) / self.mass
        lo = np.full(v.shape, float(self.J))
        guess = (g0 / v) ** 2
        hi = np.maximum(4.0 * guess, lo + 1.0)
        bad = self.tail_survival(hi) >= v
        while bad.any():
            hi[bad] *= 4.0
            bad = self.tail_survival(hi) >= v
        while True:
            gap = hi - lo
            active = gap > np.maximum(1.0, hi * 1e-15)
            if not active.any():
                break
            mid = np.floor(lo + gap / 2)
            below = self.tail_survival(mid) < v
            hi = np.where(active & below, mid, hi)
            lo = np.where(active & ~below, mid, lo)
        return hi

    def sample(self, rng: np.random.Generator, size: int) -> np.ndarray:
        """``size`` draws as float64 (heavy tails overflow int64 rarely)."""
        u = rng.random(size)
        v = 1.0 - u  # survival target in (0, 1]
        beyond = v < self.survival[self.J]
        if beyond.any() and self.J < _HEAD_MAX:
            self.ensure_head(_HEAD_MAX)
            beyond = v < self.survival[self.J]
        out = np.searchsorted(self._neg_surv, -v, side="right").astype(float)
        if beyond.any():
            # resample the conditional position inside the tail for resolution
            cond = rng.random(int(beyond.sum()))
            out[beyond] = self._invert_tail(self.survival[self.J] * (1.0 - cond))
        return out


_laws: dict[Law, _HeavyLaw] = {}
_laws_lock = threading.Lock()


def _heavy(law: Law) -> _HeavyLaw:
    with _laws_lock:
        if law not in _laws:
            if law is Law.L:
                _laws[law] = _HeavyLaw(2 * RHO, L_MASS)
            elif law is Law.R:
                _laws[law] = _HeavyLaw(RHO, R_MASS)
            else:
                raise ValueError(f"{law} is not a heavy-tailed law")
        return _laws[law]


def head_total_mass(law: Law | str) -> float:
    """Mass of the L or R law as fsum of the exact head plus analytic tail."""
    h = _heavy(Law(law))
    h.ensure_head(_HEAD_MAX)
    return math.fsum(h.pmf) + scaled_tail_sum(h.J) / h.mass


def sample(law: Law | str, rng: np.random.Generator, size: int | None = None):
    """Draws from a component law.

    Scalar draws return ``int`` (or ``INF``); array draws return float64
    arrays with ``inf`` for the atoms at infinity.
    """
    law = Law(law)
    n = 1 if size is None else int(size)
    if law is Law.CHI:
        out = rng.integers(0, 2, size=n).astype(float)
    elif law is Law.N:
        pos = rng.random(n) >= SQRT2 / 2
        out = np.zeros(n)
        # given N >= 1, N - 1 is geometric with ratio rho
        out[pos] = rng.geometric(1.0 - RHO, size=int(pos.sum()))
    elif law in (Law.L, Law.R):
        out = _heavy(law).sample(rng, n)
    elif law is Law.TILDE_L:
        inf = rng.random(n) < SQRT2 - 1
        out = np.full(n, INF)
        out[~inf] = _heavy(Law.L).sample(rng, int((~inf).sum()))
    else:
        inf = rng.random(n) < 2 - SQRT2
        out = np.full(n, INF)
        out[~inf] = _heavy(Law.R).sample(rng, int((~inf).sum()))
    if size is None:
        x = out[0]
        return INF if x == INF else int(x)
    return out


# --------------------------------------------------------------------------
# prefix windows


@dataclass
class LimitPiece:
    """One cycle of the concatenation.

    ``values`` holds the permutation content laid so far; it is the whole
    piece when ``complete`` and only the needed prefix otherwise.
    """

    discard_start: int
    discarded_len: int
    kind: str  # "perm" or "inf"
    length: int
    block_start: int | None = None
    values: tuple[int, ...] = ()
    complete: bool = True
    arrivals: int = 0
    states: tuple[CycleState, ...] = ()

    @property
    def perm(self) -> Permutation | None:
        if self.kind != "perm" or not self.complete:
            return None
        return Permutation(self.values, self.block_start)


@dataclass
class PrefixWindow:
    m: int
    coords: list = field(default_factory=list)
    pieces: list[LimitPiece] = field(default_factory=list)
    truncated: bool = False
    truncations: int = 0
    mode: Mode = Mode.MECHANISM

    @property
    def frontier(self) -> int:
        """Largest value involved (discarded or placed) so far."""
        return sum(p.discarded_len + (p.length if p.kind == "perm" else 0) for p in self.pieces)

    def check_partition(self) -> bool:
        """Discarded blocks and permutation blocks tile [1, frontier] in order,
        every finite coordinate sits in its piece's block and finite values
        are distinct."""
        nxt = 1
        for p in self.pieces:
            if p.discard_start != nxt:
                return False
            nxt += p.discarded_len
            if p.kind == "perm":
                if p.block_start != nxt:
                    return False
                if any(not nxt <= v < nxt + p.length for v in p.values):
                    return False
                if p.complete and sorted(p.values) != list(range(nxt, nxt + p.length)):
                    return False
                nxt += p.length
        finite = [c for c in self.coords if c != INF]
        return len(finite) == len(set(finite)) and nxt - 1 == self.frontier


class _Stream:
    """Buffered draws of one law from a shared generator."""

    def __init__(self, rng: np.random.Generator, law: Law | None, batch: int = 64):
        self.rng, self.law, self.batch = rng, law, batch
        self.buf: np.ndarray = np.empty(0)
        self.i = 0

    def next(self) -> float:
        if self.i >= len(self.buf):
            if self.law is None:
                self.buf = self.rng.random(self.batch)
            else:
                self.buf = sample(self.law, self.rng, self.batch)
            self.i = 0
        x = self.buf[self.i]
        self.i += 1
        return float(x)


class LimitSampler:
    """Reusable prefix sampler; one instance per random stream."""

    def __init__(self, rng: np.random.Generator | int | None, cap: int = DEFAULT_CAP):
        self.rng = make_rng(rng)
        if cap < 1:
            raise ValueError("cap must be >= 1")
        self.cap = int(cap)
        self._u = _Stream(self.rng, None)
        self._L = _Stream(self.rng, Law.L)
        self._R = _Stream(self.rng, Law.R)
        self._N = _Stream(self.rng, Law.N)

    def _length(self, stream: _Stream, window: PrefixWindow) -> int:
        x = stream.next()
        if x > self.cap:
            window.truncated = True
            window.truncations += 1
            return self.cap
        return int(x)

    def _initial_state(self) -> CycleState:
        u = self._u.next()
        acc = 0.0
        for state, p in zip(CycleState, INITIAL_STATE_PROBS):
            acc += p
            if u < acc:
                return state
        return CycleState.MINUS_I

    def _cycle(self, window: PrefixWindow) -> tuple[int, int, bool, int, tuple[CycleState, ...]]:
        """One regenerative cycle: (discarded, arrivals, is_perm, L, states)."""
        discarded = 0
        arrivals = 0
        states = []
        if window.mode is Mode.THEOREM:
            arrivals = int(self._N.next())
            for _ in range(arrivals):
                discarded += self._length(self._R, window)
            is_perm = self._u.next() < 0.5
            return discarded, arrivals, is_perm, self._length(self._L, window), ()
        state = self._initial_state()
        while True:
            states.append(state)
            if state is CycleState.MINUS_I:
                arrivals += 1
                discarded += self._length(self._R, window)
                state = CycleState.PLUS_F if self._u.next() < P_TO_FINITE else CycleState.PLUS_I
            elif state is CycleState.PLUS_I:
                state = CycleState.MINUS_F if self._u.next() < P_TO_FINITE else CycleState.MINUS_I
            else:
                length = self._length(self._L, window)
                return discarded, arrivals, state is CycleState.PLUS_F, length, tuple(states)

    def prefix(self, m: int, mode: Mode | str = Mode.MECHANISM, *, complete_pieces: bool = False) -> PrefixWindow:
        if m < 1:
            raise ValueError("m must be >= 1")
        if self.cap < m:
            raise ValueError(f"cap ({self.cap}) must be >= m ({m})")
        window = PrefixWindow(m=m, mode=Mode.parse(mode))
        nxt = 1
        while len(window.coords) < m:
            discarded, arrivals, is_perm, length, states = self._cycle(window)
            piece = LimitPiece(nxt, discarded, "perm" if is_perm else "inf", length,
                               arrivals=arrivals, states=states)
            nxt += discarded
            need = m - len(window.coords)
            if is_perm:
                piece.block_start = nxt
                take = length if complete_pieces else min(length, need)
                it = iter_sep_values(length, SepClass.INDECOMPOSABLE, self.rng, start=nxt)
                piece.values = tuple(next(it) for _ in range(take))
                piece.complete = take == length
                window.coords.extend(piece.values[:need])
                nxt += length
            else:
                window.coords.extend([INF] * min(length, need))
            window.pieces.append(piece)
        return window

    def cycles(self, count: int, mode: Mode | str = Mode.MECHANISM) -> list[LimitPiece]:
        """Bookkeeping of ``count`` cycles without permutation content."""
        window = PrefixWindow(m=0, mode=Mode.parse(mode))
        out = []
        nxt = 1
        for _ in range(count):
            discarded, arrivals, is_perm, length, states = self._cycle(window)
            out.append(LimitPiece(nxt, discarded, "perm" if is_perm else "inf", length,
                                  block_start=nxt + discarded if is_perm else None,
                                  complete=not is_perm, arrivals=arrivals, states=states))
            nxt += discarded + (length if is_perm else 0)
        return out


def sample_limit_prefix(
    m: int,
    mode: Mode | str,
    cap: int,
    rng: np.random.Generator | int | None,
    *,
    complete_pieces: bool = False,
) -> PrefixWindow:
    """First ``m`` coordinates of the limit object, with piece bookkeeping.

    Lengths above ``cap`` are clamped and flagged on the window.
    """
    if cap < m:
        raise ValueError(f"cap ({cap}) must be >= m ({m})")
    return LimitSampler(rng, cap).prefix(m, mode, complete_pieces=complete_pieces)


def embed_finite(sigma: Permutation | Sequence[int], m: int | None = None) -> list[int]:
    """Coordinates of sigma in S(N, N*): sigma_1..sigma_n, then j at j > n."""
    vals = tuple(sigma)
    if isinstance(sigma, Permutation) and sigma.block_start != 1:
        raise ValueError("only permutations of [1, n] embed")
    m = len(vals) if m is None else m
    return [vals[i] if i < len(vals) else i + 1 for i in range(m)]


def ratio_stats(window: PrefixWindow | Sequence[LimitPiece]) -> tuple[float, float]:
    """(appearing / (appearing + discarded), integers / (integers + infinities))."""
    pieces = window.pieces if isinstance(window, PrefixWindow) else window
    appearing = sum(p.length for p in pieces if p.kind == "perm")
    discarded = sum(p.discarded_len for p in pieces)
    infinities = sum(p.length for p in pieces if p.kind == "inf")

    def div(a, b):
        return a / b if b else math.nan

    return div(appearing, appearing + discarded), div(appearing, appearing + infinities)


# --------------------------------------------------------------------------
# metric on S(N, N*)


def metric_nstar(i: int | float, j: int | float) -> Fraction:
    """``sum_{k=i}^{j-1} 2^-k`` for i <= j in N*, symmetric."""
    if i == j:
        return Fraction(0)
    if i > j:
        i, j = j, i
    i = int(i)
    if i < 1:
        raise ValueError("N* starts at 1")
    upper = Fraction(0) if j == INF else Fraction(1, 2 ** (int(j) - 1))
    return Fraction(1, 2 ** (i - 1)) - upper


def metric_S(a: Sequence | PrefixWindow, b: Sequence | PrefixWindow) -> tuple[Fraction, Fraction]:
    """Partial sum of ``D`` over the common prefix and a bound on the rest.

    Each ignored coordinate contributes at most ``2^-i``, so the tail beyond
    a prefix of length m is bounded by ``2^-m``.
    """
    ca = a.coords if isinstance(a, PrefixWindow) else list(a)
    cb = b.coords if isinstance(b, PrefixWindow) else list(b)
    m = min(len(ca), len(cb))
    total = sum((metric_nstar(x, y) / 2**i for i, (x, y) in enumerate(zip(ca, cb), 1)), Fraction(0))
    return total, Fraction(1, 2**m)


# --------------------------------------------------------------------------
# finite-n vs limit comparison


def _bucket(v, value_cap: int):
    return "big" if v == INF or v > value_cap else int(v)


def _tv(p: Counter, q: Counter, n_p: int, n_q: int) -> tuple[float, float, float]:
    """TV estimate, delta-method standard error, and the noise floor under equality."""
    cells = set(p) | set(q)
    tv = 0.0
    sgn_p = 0.0
    sgn_q = 0.0
    sq_p = 0.0
    sq_q = 0.0
    floor = 0.0
    for c in cells:
        a, b = p[c] / n_p, q[c] / n_q
        tv += abs(a - b)
        s = 1.0 if a > b else -1.0 if a < b else 0.0
        sgn_p += s * a
        sgn_q += s * b
        sq_p += s * s * a
        sq_q += s * s * b
        pooled = (p[c] + q[c]) / (n_p + n_q)
        floor += math.sqrt(pooled * (1 - pooled) * (1 / n_p + 1 / n_q) * 2 / math.pi)
    var = (sq_p - sgn_p**2) / n_p + (sq_q - sgn_q**2) / n_q
    return 0.5 * tv, 0.5 * math.sqrt(max(var, 0.0)), 0.5 * floor


def _finite_prefix_counts(args):
    n, m, value_cap, reps, rng = args
    joint: Counter = Counter()
    for _ in range(reps):
        it = iter_sep_values(n, SepClass.ALL, rng)
        head = [next(it) for _ in range(min(m, n))]
        joint[tuple(_bucket(v, value_cap) for v in embed_finite(head, m))] += 1
    return joint, 0


def _limit_prefix_counts(args):
    m, value_cap, reps, mode, rng, cap = args
    joint: Counter = Counter()
    sampler = LimitSampler(rng, cap)
    truncations = 0
    for _ in range(reps):
        w = sampler.prefix(m, mode)
        truncations += w.truncations
        joint[tuple(_bucket(v, value_cap) for v in w.coords[:m])] += 1
    return joint, truncations


def _chunks(reps: int, size: int) -> list[int]:
    return [min(size, reps - lo) for lo in range(0, reps, size)]


def _run_chunks(fn, make_args, rng, reps, jobs, chunk):
    """Sum the Counters of per-chunk runs; chunk k always uses stream k."""
    sizes = _chunks(reps, chunk)
    tasks = [make_args(k, r) for k, r in zip(sizes, rng.spawn(len(sizes)))]
    if jobs > 1 and len(tasks) > 1:
        from concurrent.futures import ProcessPoolExecutor

        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(fn, tasks))
    else:
        results = [fn(t) for t in tasks]
    total: Counter = Counter()
    trunc = 0
    for joint, t in results:
        total.update(joint)
        trunc += t
    return total, trunc


def _marginal(joint: Counter, i: int) -> Counter:
    out: Counter = Counter()
    for key, c in joint.items():
        out[key[i]] += c
    return out


def _histogram(c: Counter) -> dict:
    return {str(k): v for k, v in sorted(c.items(), key=lambda kv: (kv[0] == "big", kv[0] if kv[0] != "big" else 0))}


def compare_prefix_laws(
    n: int,
    m: int,
    value_cap: int,
    reps: int,
    mode: Mode | str,
    rng: np.random.Generator | int | None,
    *,
    limit_reps: int | None = None,
    cap: int = DEFAULT_CAP,
    jobs: int = 1,
    chunk: int = 10_000,
) -> dict:
    """Total-variation probe of (sigma_1..sigma_m) at size n against the limit.

    Values above ``value_cap`` (and infinities) share one bucket, which is
    how neighbourhoods of infinity look in N*. Replicas run in chunks of
    ``chunk`` with one spawned stream per chunk, so the report does not
    depend on ``jobs``. Returns a JSON-ready report.
    """
    mode = Mode.parse(mode)
    if reps < 1 or (limit_reps is not None and limit_reps < 1):
        raise ValueError("reps must be >= 1")
    if m < 1 or n < 1:
        raise ValueError("n and m must be >= 1")
    seed = rng if isinstance(rng, int) else None
    rng = make_rng(rng)
    finite_rng, limit_rng = rng.spawn(2)
    limit_reps = reps if limit_reps is None else limit_reps

    fj, _ = _run_chunks(
        _finite_prefix_counts, lambda k, r: (n, m, value_cap, k, r), finite_rng, reps, jobs, chunk
    )
    lj, truncations = _run_chunks(
        _limit_prefix_counts, lambda k, r: (m, value_cap, k, mode, r, max(cap, m)),
        limit_rng, limit_reps, jobs, chunk,
    )
    fc = [_marginal(fj, i) for i in range(m)]
    lc = [_marginal(lj, i) for i in range(m)]

    tv, se, floor = _tv(fj, lj, reps, limit_reps)
    per_coord = []
    for i in range(m):
        t, s, f = _tv(fc[i], lc[i], reps, limit_reps)
        per_coord.append({"coord": i + 1, "tv": t, "se": s, "noise_floor": f,
                          "finite_hist": _histogram(fc[i]), "limit_hist": _histogram(lc[i])})

    p1_f = fc[0][1] / reps
    p1_l = lc[0][1] / limit_reps
    report = {
        "mode": mode.value,
        "n": n,
        "m": m,
        "value_cap": value_cap,
        "reps": reps,
        "limit_reps": limit_reps,
        "seed": seed,
        "tv_joint": tv,
        "tv_joint_se": se,
        "tv_joint_noise_floor": floor,
        "joint_cells": len(set(fj) | set(lj)),
        "per_coordinate": per_coord,
        "p_first_is_1": {
            "finite": p1_f,
            "finite_se": math.sqrt(p1_f * (1 - p1_f) / reps),
            "limit": p1_l,
            "limit_se": math.sqrt(p1_l * (1 - p1_l) / limit_reps),
        },
        "truncations": truncations,
        "warnings": [],
    }
    if floor > 0.5 * max(tv, 1e-300) or reps < 100 * report["joint_cells"]:
        report["warnings"].append(
            f"reps={reps} is small for {report['joint_cells']} joint cells; "
            f"TV noise floor is about {floor:.3g}"
        )
    return report

"""One-sided stable-1/2 limits of the scaled piece lengths.

Closed-form characteristic functions of the limits, exact finite-n
characteristic functions through the Schröder generating function, Monte
Carlo for the scaled sums and for the two ratio statistics, whose common
limit is the arcsine law.

Characteristic functions use the convention ``E exp(-i t X)`` throughout,
including :func:`empirical_cf`.
"""

from __future__ import annotations

import cmath
import enum
import math
from dataclasses import dataclass

import numpy as np
from scipy import stats

from ._rng import make_rng
from .limitlaw import L_MASS, R_MASS, Law, sample
from .schroeder import RHO, SQRT2, OutOfDomainError, _circle_radicand

__all__ = [
    "StableCF",
    "Kind",
    "RatioKind",
    "cf_grid",
    "empirical_cf",
    "exact_cf_L_sum",
    "exact_cf_R_sum",
    "exact_cf_chi_L",
    "exact_cf_compound",
    "joint_cf",
    "limit_constant_report",
    "mc_ratio_experiment",
    "mc_scaled_sum_L",
    "phi",
    "sample_levy",
]

#: P(N = 0)
_N0 = SQRT2 / 2


@dataclass(frozen=True)
class StableCF:
    """``t -> exp(-c |t|^(1/2) (1 + i sgn t))``."""

    c: float

    def __call__(self, t: float) -> complex:
        if t == 0:
            return 1.0 + 0.0j
        r = self.c * math.sqrt(abs(t))
        return cmath.exp(-r * complex(1.0, math.copysign(1.0, t)))

    @property
    def levy_scale(self) -> float:
        """Scale ``c^2`` of the matching ``scale / G^2`` representation."""
        return self.c * self.c


class Kind(enum.Enum):
    ZL = "zl"
    ZR = "zr"
    Z = "z"


STABLE = {
    Kind.ZL: StableCF(0.5**0.75),
    Kind.ZR: StableCF(0.5**0.25),
    Kind.Z: StableCF(0.5**1.75),
}


def phi(kind: Kind | str, t: float) -> complex:
    return STABLE[Kind(kind.lower() if isinstance(kind, str) else kind)](t)


# --------------------------------------------------------------------------
# exact finite-n characteristic functions


def _sqrt_radicand(theta: float) -> complex:
    rad = _circle_radicand(theta)
    if rad.real < 0.0:
        raise OutOfDomainError(f"radicand {rad} left the right half plane at theta={theta}")
    return cmath.sqrt(rad)


def _cf_L_minus_one(theta: float) -> complex:
    # (z + s(z)) - (rho + s(rho)) = ((z - rho) - sqrt(radicand)) / 2, with z = rho e^{-i theta}
    dz = RHO * (cmath.exp(-1j * theta) - 1.0)
    return 0.5 * (dz - _sqrt_radicand(theta)) / L_MASS


def _cf_R_minus_one(theta: float) -> complex:
    # s(z) - s(rho) = (rho - z - sqrt(radicand)) / 2
    dz = RHO * (cmath.exp(-1j * theta) - 1.0)
    return 0.5 * (-dz - _sqrt_radicand(theta)) / R_MASS


def _power(inner_minus_one: complex, n: int) -> complex:
    if inner_minus_one == 0:
        return 1.0 + 0.0j
    return cmath.exp(n * cmath.log(1.0 + inner_minus_one))


def _check_n(n: int) -> None:
    if n < 1:
        raise ValueError("n must be >= 1")


def exact_cf_L_sum(t: float, n: int) -> complex:
    """``E exp(-i t (L_1 + ... + L_n) / n^2)`` for iid L."""
    _check_n(n)
    return _power(_cf_L_minus_one(t / n**2), n)


def exact_cf_R_sum(t: float, n: int) -> complex:
    """``E exp(-i t (R_1 + ... + R_n) / n^2)`` for iid R."""
    _check_n(n)
    return _power(_cf_R_minus_one(t / n**2), n)


def exact_cf_chi_L(t: float, n: int) -> complex:
    """``E exp(-i t sum_k chi_k L_k / n^2)`` with chi fair Bernoulli."""
    _check_n(n)
    return _power(0.5 * _cf_L_minus_one(t / n**2), n)


def exact_cf_compound(t: float, n: int) -> complex:
    """``E exp(-i t sum_k sum_{m <= N_k} R_{k,m} / n^2)``.

    Given N >= 1, N - 1 is geometric, so the inner CF is
    ``sqrt2/2 + sqrt2 rho psi / (1 - rho psi)`` with psi the CF of R.
    """
    _check_n(n)
    d = _cf_R_minus_one(t / n**2)
    psi = 1.0 + d
    if abs(RHO * psi) >= 1.0:
        raise OutOfDomainError(f"|rho psi| = {abs(RHO * psi)} >= 1")
    # inner - 1 written so that it vanishes with d: sqrt2 rho d / ((1 - rho)(1 - rho psi))
    inner_minus_one = SQRT2 * RHO * d / ((1.0 - RHO) * (1.0 - RHO * psi))
    return _power(inner_minus_one, n)


def joint_cf(t: float, s: float, n: int) -> complex:
    """Joint CF of (sum chi L, sum (1-chi) L) / n^2 at (t, s)."""
    _check_n(n)
    inner_minus_one = 0.5 * _cf_L_minus_one(t / n**2) + 0.5 * _cf_L_minus_one(s / n**2)
    return _power(inner_minus_one, n)


def limit_constant_report(n: int = 10**6, ts=(0.25, 0.5, 1.0, 2.0)) -> dict:
    """Which closed forms the exact CFs of the two Z-sums approach.

    Compares against phi_Z and against the rescaled forms
    ``phi_ZR((1/2)^(3/2) t)``, ``phi_ZL(t/2)``, ``phi_ZL(t)^(1/2)`` and
    ``phi_ZR(t)^((1/2)^(3/2))``; the distance for each is the max over ``ts``.
    """
    zl, zr = STABLE[Kind.ZL], STABLE[Kind.ZR]
    en = 0.5**1.5

    def dist(exact, candidate):
        return max(abs(exact(t) - candidate(t)) for t in ts)

    comp = lambda t: exact_cf_compound(t, n)  # noqa: E731
    chil = lambda t: exact_cf_chi_L(t, n)  # noqa: E731
    return {
        "n": n,
        "compound_vs_phi_Z": dist(comp, lambda t: phi(Kind.Z, t)),
        "compound_vs_phi_ZR_of_scaled_t": dist(comp, lambda t: zr(en * t)),
        "compound_vs_phi_ZR_power_EN": dist(comp, lambda t: zr(t) ** en),
        "chi_L_vs_phi_Z": dist(chil, lambda t: phi(Kind.Z, t)),
        "chi_L_vs_phi_ZL_of_half_t": dist(chil, lambda t: zl(t / 2)),
        "chi_L_vs_phi_ZL_sqrt": dist(chil, lambda t: zl(t) ** 0.5),
    }


# --------------------------------------------------------------------------
# Monte Carlo


def sample_levy(scale: float, rng: np.random.Generator, size: int | None = None):
    """One-sided stable-1/2 draws ``scale / G^2``; CF coefficient ``sqrt(scale)``."""
    if not scale > 0:
        raise ValueError("scale must be positive")
    g = rng.standard_normal(size)
    return scale / (g * g)


def empirical_cf(samples, t: float) -> tuple[complex, float]:
    """Mean of ``exp(-i t x)`` and its standard error (modulus)."""
    x = np.asarray(samples, dtype=float)
    if t == 0:
        return 1.0 + 0.0j, 0.0
    e = np.exp(-1j * t * x)
    mean = e.mean()
    se = math.sqrt(max(float(np.mean(np.abs(e - mean) ** 2)), 0.0) / len(x))
    return complex(mean), se


def mc_scaled_sum_L(n: int, reps: int, rng, *, chunk: int = 2_000_000) -> np.ndarray:
    """``reps`` draws of ``(L_1 + ... + L_n) / n^2`` with uncapped L."""
    _check_n(n)
    rng = make_rng(rng)
    out = np.empty(reps)
    per = max(1, chunk // n)
    for lo in range(0, reps, per):
        k = min(per, reps - lo)
        out[lo:lo + k] = sample(Law.L, rng, k * n).reshape(k, n).sum(axis=1) / n**2
    return out


class RatioKind(enum.Enum):
    DISCARD = "discard"
    INFINITY = "infinity"


def _compound_sums(N: np.ndarray, rng) -> np.ndarray:
    # sum_{m <= N_k} R_{k,m} for each k, via one flat draw and bincount
    total = int(N.sum())
    owner = np.repeat(np.arange(len(N)), N.astype(np.int64))
    r = sample(Law.R, rng, total) if total else np.empty(0)
    return np.bincount(owner, weights=r, minlength=len(N))


def _ratio_batch(which: RatioKind, n: int, k: int, rng) -> np.ndarray:
    chi = sample(Law.CHI, rng, k * n).reshape(k, n)
    L = sample(Law.L, rng, k * n).reshape(k, n)
    appearing = (chi * L).sum(axis=1)
    if which is RatioKind.DISCARD:
        N = sample(Law.N, rng, k * n)
        other = _compound_sums(N, rng).reshape(k, n).sum(axis=1)
    else:
        other = ((1.0 - chi) * L).sum(axis=1)
    total = appearing + other
    with np.errstate(invalid="ignore", divide="ignore"):
        return np.where(total > 0, appearing / np.where(total > 0, total, 1.0), np.nan)


def mc_ratio_experiment(
    which: RatioKind | str,
    n: int,
    reps: int,
    rng,
    *,
    chunk: int = 2_000_000,
    bins: int = 20,
) -> tuple[np.ndarray, dict]:
    """Samples of the appearing/discarded or integers/infinities ratio over n cycles.

    The summary carries mean, standard error, a histogram on [0, 1] and the
    Kolmogorov–Smirnov test against the arcsine law.
    """
    which = RatioKind(which)
    _check_n(n)
    if reps < 1:
        raise ValueError("reps must be >= 1")
    rng = make_rng(rng)
    out = np.empty(reps)
    per = max(1, chunk // n)
    for lo in range(0, reps, per):
        k = min(per, reps - lo)
        out[lo:lo + k] = _ratio_batch(which, n, k, rng)
    finite = out[~np.isnan(out)]
    ks = stats.kstest(finite, stats.arcsine.cdf) if len(finite) else None
    counts, edges = np.histogram(finite, bins=bins, range=(0.0, 1.0))
    summary = {
        "which": which.value,
        "n": n,
        "reps": reps,
        "undefined": int(np.isnan(out).sum()),
        "mean": float(finite.mean()) if len(finite) else math.nan,
        "se": float(finite.std(ddof=1) / math.sqrt(len(finite))) if len(finite) > 1 else math.nan,
        "hist_edges": edges.tolist(),
        "hist_counts": counts.tolist(),
        "ks_arcsine_stat": float(ks.statistic) if ks else math.nan,
        "ks_arcsine_pvalue": float(ks.pvalue) if ks else math.nan,
    }
    return out, summary


# --------------------------------------------------------------------------
# grids


_EXACT = {
    Kind.ZL: exact_cf_L_sum,
    Kind.ZR: exact_cf_R_sum,
    Kind.Z: exact_cf_compound,
}


def cf_grid(kind: str, n: int, ts, s: float | None = None) -> list[dict]:
    """Rows ``t, re_exact, im_exact, re_limit, im_limit, abs_err``.

    ``kind`` is ``zl``, ``zr``, ``z`` or ``joint`` (joint uses the fixed
    second argument ``s`` and the limit ``phi_Z(t) phi_Z(s)``).
    """
    rows = []
    for t in ts:
        t = float(t)
        if kind == "joint":
            s_val = 0.0 if s is None else float(s)
            exact = joint_cf(t, s_val, n)
            limit = phi(Kind.Z, t) * phi(Kind.Z, s_val)
        else:
            k = Kind(kind)
            exact = _EXACT[k](t, n)
            limit = phi(k, t)
        rows.append({
            "t": t,
            "re_exact": exact.real,
            "im_exact": exact.imag,
            "re_limit": limit.real,
            "im_limit": limit.imag,
            "abs_err": abs(exact - limit),
        })
    return rows

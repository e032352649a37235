import cmath
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy import stats

from seplimit import stablelab as sl
from seplimit.schroeder import RHO, SQRT2, OutOfDomainError, gen_func_eval
from seplimit.stablelab import Kind

KINDS = list(Kind)


@given(st.sampled_from(KINDS), st.floats(-1e4, 1e4))
def test_cf_invariants(kind, t):
    v = sl.phi(kind, t)
    assert abs(v) <= 1 + 1e-15
    assert sl.phi(kind, -t) == pytest.approx(v.conjugate(), abs=1e-15)
    assert sl.phi(kind, 4 * t) == pytest.approx(v * v, abs=1e-12)


def test_cf_values():
    assert sl.phi("z", 0) == 1
    c = 0.5**1.75
    assert sl.phi("z", 1) == pytest.approx(math.exp(-c) * complex(math.cos(c), -math.sin(c)), abs=1e-15)
    for t in (0.1, 1, 10):
        assert abs(sl.phi(Kind.Z, 4 * t) - sl.phi(Kind.Z, t) ** 2) <= 1e-12
    assert sl.STABLE[Kind.ZL].c == pytest.approx(0.5**0.75)
    assert sl.STABLE[Kind.ZR].levy_scale == pytest.approx(0.5**0.5)


def test_branch_constant_identity():
    assert abs((2 + SQRT2) / 2 * math.sqrt(3 * SQRT2 - 4) - 0.5**0.25) <= 1e-14


def _direct_cf_L(theta):
    z = RHO * cmath.exp(-1j * theta)
    return (z + gen_func_eval(z)) / (2 - SQRT2)


def _direct_cf_R(theta):
    z = RHO * cmath.exp(-1j * theta)
    return gen_func_eval(z) / (SQRT2 - 1)


@pytest.mark.parametrize("t", [0.3, 1.0, -2.0])
@pytest.mark.parametrize("n", [1, 3, 10])
def test_exact_cfs_match_direct_formulas(t, n):
    th = t / n**2
    assert sl.exact_cf_L_sum(t, n) == pytest.approx(_direct_cf_L(th) ** n, abs=1e-12)
    assert sl.exact_cf_R_sum(t, n) == pytest.approx(_direct_cf_R(th) ** n, abs=1e-12)
    assert sl.exact_cf_chi_L(t, n) == pytest.approx((0.5 + 0.5 * _direct_cf_L(th)) ** n, abs=1e-12)
    psi = _direct_cf_R(th)
    inner = SQRT2 / 2 + SQRT2 * RHO * psi / (1 - RHO * psi)
    assert sl.exact_cf_compound(t, n) == pytest.approx(inner**n, abs=1e-12)


def test_single_L_cf_against_pmf_sum():
    from seplimit.limitlaw import Law, pmf, scaled_tail_sum

    # truncated series plus a crude tail bound
    t = 0.7
    J = 4000
    series = sum(pmf(Law.L, j) * cmath.exp(-1j * t * j) for j in range(1, J + 1))
    tail = scaled_tail_sum(J) / (2 - SQRT2)
    assert abs(sl.exact_cf_L_sum(t, 1) - series) <= tail + 1e-12


def test_zero_argument():
    for f in (sl.exact_cf_L_sum, sl.exact_cf_compound, sl.exact_cf_R_sum, sl.exact_cf_chi_L):
        assert f(0.0, 7) == 1
    assert sl.joint_cf(0, 0, 7) == 1
    with pytest.raises(ValueError):
        sl.exact_cf_L_sum(1.0, 0)


def test_convergence_rates():
    ts = (0.25, 0.5, 1.0, 2.0)
    pairs = [
        (sl.exact_cf_L_sum, Kind.ZL),
        (sl.exact_cf_R_sum, Kind.ZR),
        (sl.exact_cf_compound, Kind.Z),
        (sl.exact_cf_chi_L, Kind.Z),
    ]
    for f, kind in pairs:
        for t in ts:
            errs = [abs(f(t, n) - sl.phi(kind, t)) for n in (100, 1000, 10_000)]
            assert errs[0] > errs[1] > errs[2]
            assert errs[2] <= 1e-2
            for n, e in zip((100, 1000, 10_000), errs):
                assert e <= 10 / n


def test_joint_cf():
    assert sl.joint_cf(1, 2, 50) == sl.joint_cf(2, 1, 50)
    errs = [abs(sl.joint_cf(1, 2, n) - sl.phi("z", 1) * sl.phi("z", 2)) for n in (100, 1000, 10_000)]
    assert errs[0] > errs[1] > errs[2] and errs[2] <= 1e-2
    # marginal slices give the chi-weighted sum
    assert sl.joint_cf(0.8, 0, 300) == pytest.approx(sl.exact_cf_chi_L(0.8, 300), abs=1e-14)


def test_limit_constant_report():
    rep = sl.limit_constant_report(n=10**5)
    assert rep["compound_vs_phi_Z"] < 1e-5
    assert rep["chi_L_vs_phi_Z"] < 1e-5
    assert rep["compound_vs_phi_ZR_power_EN"] < 1e-5
    # rescaling the argument instead of the exponent gives a different law
    assert rep["compound_vs_phi_ZR_of_scaled_t"] > 0.1
    assert rep["chi_L_vs_phi_ZL_of_half_t"] > 0.1


def test_out_of_domain_reported(monkeypatch):
    monkeypatch.setattr(sl, "_circle_radicand", lambda theta: complex(-1.0, 0.0))
    with pytest.raises(OutOfDomainError):
        sl.exact_cf_L_sum(1.0, 10)


# --------------------------------------------------------------------------
# Monte Carlo


def test_levy_samples_positive(rng):
    x = sl.sample_levy(0.3, rng, 1000)
    assert np.all(x > 0)
    assert sl.empirical_cf(x, 0) == (1, 0)
    with pytest.raises(ValueError):
        sl.sample_levy(0.0, rng, 3)


def test_levy_calibration_small(rng):
    for kind in KINDS:
        scale = sl.STABLE[kind].levy_scale
        x = sl.sample_levy(scale, rng, 200_000)
        for t in (0.5, 1.0, 2.0):
            emp, se = sl.empirical_cf(x, t)
            assert abs(emp - sl.phi(kind, t)) < 4 * se


def test_levy_ratio_is_arcsine(rng):
    z1 = sl.sample_levy(0.7, rng, 50_000)
    z2 = sl.sample_levy(0.7, rng, 50_000)
    assert stats.kstest(z1 / (z1 + z2), stats.arcsine.cdf).pvalue > 1e-3


def test_scaled_L_sum_small(rng):
    x = sl.mc_scaled_sum_L(300, 20_000, rng)
    for t in (0.5, 1.0):
        emp, se = sl.empirical_cf(x, t)
        exact = sl.exact_cf_L_sum(t, 300)
        assert abs(emp - exact) < 4 * se


def test_compound_mc_matches_exact(rng):
    from seplimit.limitlaw import Law, sample

    n, reps = 200, 20_000
    N = sample(Law.N, rng, n * reps)
    sums = sl._compound_sums(N, rng).reshape(reps, n).sum(axis=1) / n**2
    for t in (0.5, 1.0):
        emp, se = sl.empirical_cf(sums, t)
        assert abs(emp - sl.exact_cf_compound(t, n)) < 4 * se


@pytest.mark.parametrize("which", ["discard", "infinity"])
def test_ratio_experiment_small(which):
    x, summary = sl.mc_ratio_experiment(which, 200, 3000, 17)
    finite = x[~np.isnan(x)]
    assert np.all((finite >= 0) & (finite <= 1))
    assert summary["reps"] == 3000 and sum(summary["hist_counts"]) == len(finite)
    assert abs(summary["mean"] - 0.5) < 4 * summary["se"]
    assert summary["ks_arcsine_pvalue"] > 1e-3


def test_ratio_determinism():
    a, _ = sl.mc_ratio_experiment("discard", 50, 200, 4)
    b, _ = sl.mc_ratio_experiment("discard", 50, 200, 4)
    assert np.array_equal(a, b, equal_nan=True)


def test_cf_grid_rows():
    rows = sl.cf_grid("zl", 10_000, [0.0, 1.0])
    assert rows[0]["abs_err"] == 0
    assert set(rows[0]) == {"t", "re_exact", "im_exact", "re_limit", "im_limit", "abs_err"}
    joint = sl.cf_grid("joint", 10_000, [1.0], s=2.0)
    assert joint[0]["abs_err"] <= 1e-2

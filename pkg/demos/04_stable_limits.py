"""Scaled piece lengths: exact characteristic functions, Monte Carlo and arcsine ratios.

Run: python demos/04_stable_limits.py
"""
import numpy as np
from scipy import stats

from seplimit import stablelab as sl

print(" n      |cf_L - phi_ZL|   |cf_compound - phi_Z|")
for n in (10, 100, 1000, 10_000):
    print(f"{n:6d}  {abs(sl.exact_cf_L_sum(1.0, n) - sl.phi('zl', 1.0)):.3e}"
          f"        {abs(sl.exact_cf_compound(1.0, n) - sl.phi('z', 1.0)):.3e}")

print("constant check:", {k: f"{v:.2e}" if isinstance(v, float) else v
                          for k, v in sl.limit_constant_report(10**5).items()})

x = sl.mc_scaled_sum_L(500, 20_000, 1)
for t in (0.5, 1.0):
    emp, se = sl.empirical_cf(x, t)
    print(f"t={t}: empirical {emp:.4f} (+-{se:.4f}) vs limit {sl.phi('zl', t):.4f}")

r, summary = sl.mc_ratio_experiment("discard", 500, 4000, 2)
print("discard ratio: mean", round(summary["mean"], 4), "KS vs arcsine p =", round(summary["ks_arcsine_pvalue"], 3))
hist, _ = np.histogram(r, bins=10, range=(0, 1))
print("histogram (U-shaped):", hist.tolist())
print("arcsine decile masses:", np.diff(stats.arcsine.cdf(np.linspace(0, 1, 11))).round(3).tolist())

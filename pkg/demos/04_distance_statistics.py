#!/usr/bin/env python3
# Walkthrough: analytic moments of pairwise distances between ideal
# Gaussian series, the effect of the two scaling schemes, and Monte Carlo
# agreement.  Scaling short series by sqrt(256/m) lines the means up with
# length-256 series but inflates the variance; scaling by sqrt(1/m)
# stabilizes both, which is what the training losses rely on.

import math

import seaidx as sx

print(f"{'m':>4} | {'mean':>8} {'var':>8} | {'x sqrt(256/m)':>17} | {'x sqrt(1/m)':>17}")
for m in (256, 128, 96, 16, 8):
    s0 = sx.chi_stats_analytic(m, 1.0)
    s1 = sx.chi_stats_analytic(m, math.sqrt(256 / m))
    s2 = sx.chi_stats_analytic(m, math.sqrt(1 / m))
    print(f"{m:>4} | {s0.mean:8.4f} {s0.variance:8.4f} | "
          f"{s1.mean:8.4f} {s1.variance:8.4f} | {s2.mean:8.4f} {s2.variance:8.4f}")

print("\nMonte Carlo vs analytic (m=128, 100k pairs):")
ana = sx.chi_stats_analytic(128, 1.0)
mc = sx.chi_stats_montecarlo(128, 1.0, n_pairs=100_000, seed=1)
se_mean, se_var = sx.chi_stats_stderr(128, 1.0, 100_000)
print(f"  mean: analytic {ana.mean:.4f}  mc {mc.mean:.4f}  (3se = {3*se_mean:.4f})")
print(f"  var : analytic {ana.variance:.4f}  mc {mc.variance:.4f}  (3se = {3*se_var:.4f})")

print("\nscale relation: mean(sqrt(1/m)) * sqrt(m) == mean(1):",)
down = sx.chi_stats_analytic(128, math.sqrt(1 / 128))
print(f"  {down.mean * math.sqrt(128):.6f} == {ana.mean:.6f}")

"""
Checking the construction against exact k-means
================================================

Collapse every small piece of P onto its centroid. The collapse moves the
distortion by at most a known amount. Exact 1-D k-means on the resulting
atoms must then land within that bound of V_n, and its centres must sit on
one of the constructed optimal sets.
"""

from fractions import Fraction

import numpy as np

from cantor_quant import compare, discretize, kmeans_exact_dp, lloyd, quantization_error

measure = discretize(Fraction(1, 2 ** 12))
print(len(measure), "atoms; collapse bound", float(measure.collapse_bound))

for n in (2, 3, 4, 5, 8):
    dp = kmeans_exact_dp(measure, n)
    gap = abs(dp.exact_distortion - quantization_error(n))
    print(n, "DP", float(dp.exact_distortion), "V_n", float(quantization_error(n)),
          "within bound:", gap <= measure.collapse_bound)

# Lloyd can only do as well as the DP, and sometimes gets stuck above it
dp = kmeans_exact_dp(measure, 6)
runs = np.array([lloyd(measure, 6, seed=s).distortion for s in range(10)])
print("Lloyd / DP for n=6:", np.round(runs / dp.distortion, 4))

# the full report the CLI's verify command prints
report = compare(4, Fraction(1, 2 ** 12), measure=measure)
print("passed:", report.passed, "matches an optimal set:", report.matches_optimal_set)

"""
The measure and its quantization errors
=======================================

P lives on [0, 1]. Its mass 1/2**j sits on the piece S_j[0, 1], which has
length 1/3**j. Everything below is exact rational arithmetic.
"""

from fractions import Fraction

import numpy as np

from cantor_quant import cell_interval, moments, quantization_error

# mean and variance come straight from the self-similarity
m = moments()
print("mean", m.mean, "variance", m.variance, "E[X^2]", m.second_raw_moment)

# the first few first-level pieces, with the gaps between them
for j in range(1, 5):
    piece = cell_interval((j,))
    print(f"J_{j} = [{piece.lo}, {piece.hi}]  mass {Fraction(1, 2 ** j)}")

# exact n-th quantization errors
for n in (1, 2, 3, 4, 5, 8, 16):
    print(f"V_{n} = {quantization_error(n)}")

# between powers of two the error falls linearly in n, and each doubling
# cuts it by roughly a factor of 9
ns = np.arange(2, 257)
v = np.array([float(quantization_error(int(n))) for n in ns])
print("strictly decreasing:", bool(np.all(np.diff(v) < 0)))
print("V_128 / V_256 =", quantization_error(128) / quantization_error(256))

# so n**r V_n with r = log2(9) stays bounded, though it never settles down
r = np.log2(9)
scaled = ns.astype(float) ** r * v
print("n^r V_n over 16 <= n <= 256 lies in [%.4f, %.4f]"
      % (scaled[ns >= 16].min(), scaled[ns >= 16].max()))

"""
Quantised differential and weak Schatten decay
==============================================

In dimension 2 the singular values of i[sgn D, x] should behave like
k^(-1/2).  The finite section uses the exact infinite-matrix entries on a
cube of Fourier modes.
"""

import numpy as np

from nct import LatticeTruncation, ThetaMatrix, AlgebraElement, gamma_matrices, quantized_differential
from nct import decay_exponent, singular_values, weak_quasi_norm

G = gamma_matrices(2)
for name in ("zero", "golden"):
    theta = ThetaMatrix.preset(name, 2)
    U1, U2 = AlgebraElement.generator(theta, 1), AlgebraElement.generator(theta, 2)
    x = U1 + U1.H + U2 + U2.H
    for R in (10, 16):
        s = singular_values(quantized_differential(x, G, LatticeTruncation(2, R)))
        k = np.arange(50, 600)
        sup = np.max(np.sqrt(k + 1.0) * s.values[k])
        print(f"{name:6s} R={R:2d}  n={len(s):5d}  sup sqrt(k+1) mu_k = {sup:.4f}  "
              f"exponent = {decay_exponent(s, 50, 600):.3f}  weak norm (all k) = {weak_quasi_norm(s, 2):.4f}")

# a constant has zero differential
c = AlgebraElement.scalar(ThetaMatrix.golden(), 3.0)
print("constant:", singular_values(quantized_differential(c, G, LatticeTruncation(2, 6))).values.max())

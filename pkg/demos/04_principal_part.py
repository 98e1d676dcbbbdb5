"""
Principal part of the differential
==================================

dx minus A (1 + D^2)^(-1/2) decays one order faster than dx itself, and the
smoothed-sign defect behind it decays like 1/k with constant N / (8 pi).
"""

import numpy as np

from nct import AlgebraElement, LatticeTruncation, ThetaMatrix, gamma_matrices, quantized_differential
from nct import decay_exponent, singular_values, smoothed_sign_defect, weighted_A
from nct.core import OperatorMatrix

G = gamma_matrices(2)
T = LatticeTruncation(2, 14)
theta = ThetaMatrix.golden()
U1, U2 = AlgebraElement.generator(theta, 1), AlgebraElement.generator(theta, 2)
x = U1 + U1.H + 0.5 * (U1 * U2 + (U1 * U2).H)

dx = quantized_differential(x, G, T)
diff = OperatorMatrix(dx.entries - weighted_A(x, G, T).entries, T, G.N)
print("exponent of dx          :", decay_exponent(singular_values(dx), 50, 600))
print("exponent of dx - A w    :", decay_exponent(singular_values(diff), 50, 600))

s = smoothed_sign_defect(G, LatticeTruncation(2, 40))
k = np.arange(100, 2001)
print("smoothed sign exponent  :", decay_exponent(s, 100, 2000))
print("mean (k+1) mu_k         :", np.mean((k + 1) * s.values[k]), " N/(8 pi) =", G.N / (8 * np.pi))

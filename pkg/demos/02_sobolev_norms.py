"""
L_p norms, Sobolev norms and Fejer means
========================================

L_p norms come from the spectral decomposition of a finite section of
left multiplication, read off in the zero-mode vector state.
"""

import numpy as np

from nct import AlgebraElement, SobolevConfig, ThetaMatrix, fejer_mean, l2_norm, lp_norm, poincare_gap
from nct.calculus import homogeneous_sobolev_norm, square_function_norm, sobolev_sum_norm
from nct.core import random_element

theta = ThetaMatrix.golden()
U1 = AlgebraElement.generator(theta, 1)
x = U1 + U1.H

# tau(x^4) counts closed +-1 walks of length 4
print("||U1 + U1*||_4 =", lp_norm(x, SobolevConfig(p=4)), " 6^(1/4) =", 6 ** 0.25)

y = random_element(theta, 2, np.random.default_rng(0), n_terms=6, self_adjoint=True)
for p in (2, 3, 4):
    cfg = SobolevConfig(p=p)
    print(f"p={p}: three gradient norms", homogeneous_sobolev_norm(y, cfg), sobolev_sum_norm(y, cfg),
          square_function_norm(y, cfg))

# Poincare: the single lowest mode attains 1/(2 pi)
lo, hi = poincare_gap(U1)
print("Poincare ratio at U1 =", lo / hi, " 1/(2 pi) =", 1 / (2 * np.pi))

# Fejer means converge in L_2, but only in the limit
for N in (0, 1, 2, 5, 20, 100):
    print(f"N={N:3d}  ||F_N y - y||_2 = {l2_norm(fejer_mean(y, N) - y):.5f}")

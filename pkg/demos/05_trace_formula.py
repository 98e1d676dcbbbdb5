"""
Trace formula in dimension 2
============================

Left side: extrapolated log-average of mu(k, dx)^2.  Right side: integral
over the circle of tau(sum_j |d_j x - s_j sum_k s_k d_k x|^2).  Their ratio
should not depend on x or on theta.
"""

import numpy as np

from nct import LatticeTruncation, ThetaMatrix, lhs_dixmier, rhs_closed_form_d2, rhs_integral, sphere_grid
from nct import calibrate_cd, gamma_matrices
from nct.experiments import _standard_specs
from nct.traceformula import laplacian_dixmier, lattice_point_count

Q = sphere_grid(2, 64)
T = LatticeTruncation(2, 16)
for name in ("zero", "golden"):
    theta = ThetaMatrix.preset(name, 2)
    for spec in _standard_specs(2):
        x = spec.build(theta)
        lhs, rhs = lhs_dixmier(x, T), rhs_integral(x, Q)
        print(f"{spec.id}/{name:6s}  lhs {lhs:9.4f}  rhs {rhs:9.3f} (closed form {rhs_closed_form_d2(x):9.3f})"
              f"  ratio {lhs / rhs:.5f}")
print("1/(4 pi^2) =", 1 / (4 * np.pi ** 2))

# Weyl counting behind the calibration
for R in (16, 32, 64):
    print(f"R={R}: #{{|n|<=R}}/(pi R^2) = {lattice_point_count(R, 2) / (np.pi * R * R):.4f}  "
          f"Lambda((1-Lap)^-1) = {laplacian_dixmier(LatticeTruncation(2, R)):.6f}")
print("1/(4 pi) =", 1 / (4 * np.pi), " c_hat =", calibrate_cd(2, gamma_matrices(2), LatticeTruncation(2, 32)))

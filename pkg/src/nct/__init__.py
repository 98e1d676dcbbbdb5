"""Quantised calculus on finitely truncated quantum tori."""

from .core import (GOLDEN, AlgebraElement, LatticeTruncation, OperatorMatrix, ThetaMatrix, adjoint,
                   clock_shift_rep, dumps_element, element_from_dict, element_to_dict, l2_norm,
                   left_mult_matrix, loads_element, mul, periodized_trace, random_element, sigma,
                   trace_state, weyl_phase)
from .calculus import (SobolevConfig, apply_multiplier, bessel_potential, cwikel_operator, fejer_mean,
                       gradient, homogeneous_sobolev_norm, laplacian, lp_norm, multiplier_matrix,
                       partial_derivative, poincare_gap, torus_action)
from .dirac import (GammaFamily, build_A, gamma_matrices, principal_symbol, quantized_differential,
                    sign_dirac_symbol, smoothed_sign_defect, weighted_A)
from .spectral import (SingularSpectrum, decay_exponent, dixmier_log_average, extrapolate_dixmier,
                       hilbert_schmidt_norm, schatten_norm, singular_values, weak_quasi_norm)
from .traceformula import (SphereQuadrature, b_constant, calibrate_cd, commutative_rhs,
                           directional_integrand, lhs_dixmier, rhs_closed_form_d2, rhs_integral,
                           sphere_grid, tau_power, weyl_dixmier_constant)

__version__ = "0.1.0"

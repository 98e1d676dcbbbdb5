"""
Twisted Fourier algebra
=======================

Generators, the commutation phase, the trace, and a check against the
clock-and-shift matrices at a rational angle.
"""

import numpy as np

from nct import AlgebraElement, ThetaMatrix, adjoint, clock_shift_rep, mul, trace_state
from nct.core import clock_shift_element, periodized_trace

# irrational angle: U1 U2 = exp(2 pi i theta) U2 U1
theta = ThetaMatrix.golden()
U1 = AlgebraElement.generator(theta, 1)
U2 = AlgebraElement.generator(theta, 2)
print("U1 U2      =", U1 * U2)
print("U2 U1      =", U2 * U1)
print("phase      =", (U1 * U2)[(1, 1)] / (U2 * U1)[(1, 1)])
print("exp(2pi i theta) =", np.exp(2j * np.pi * theta.entries[0, 1]))

# adjoint of a mixed monomial picks up the reordering phase
u11 = AlgebraElement.monomial(theta, (1, 1))
print("(U^(1,1))* =", adjoint(u11))

# trace picks the zero mode; tau(x* x) is the sum of |coefficients|^2
x = U1 + 0.5 * U2 + 0.25j * u11
print("tau(x* x)  =", trace_state(adjoint(x) * x).real, " sum |c|^2 =", sum(abs(c) ** 2 for _, c in x))

# rational angle 1/3: the algebra maps to 3x3 matrices
third = ThetaMatrix.from_pair(2, 1 / 3)
a = AlgebraElement.monomial(third, (1, 2)) + AlgebraElement.monomial(third, (0, -1), 2.0)
b = AlgebraElement.monomial(third, (2, 1)) - AlgebraElement.monomial(third, (1, 0))
lhs = clock_shift_element(1, 3, mul(a, b))
rhs = clock_shift_element(1, 3, a) @ clock_shift_element(1, 3, b)
print("representation defect  =", np.abs(lhs - rhs).max())
print("(1/3) Tr vs periodized =", np.trace(lhs) / 3, periodized_trace(mul(a, b), 3))
print("C =\n", np.round(clock_shift_rep(1, 3, (1, 0)), 3))

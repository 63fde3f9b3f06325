"""Frenet frames, the reversed curve, and one-parameter subgroups.

A unit-speed helix in R^3 has constant curvature and torsion. Integrating
its Frenet equations with e_3 as the new tangent gives a curve whose
curvatures come in the opposite order, and whose first two derivatives
span the plane orthogonal to the old tangent.
"""

import numpy as np

from ssproj.curve import frenet_frame, frenet_residual, helix, nondegeneracy_check, one_param_curve, reversed_curve
from ssproj.group import cyclic_vector_check
from ssproj.linalg import block_skew

c = helix(1.0, 0.5)
f = frenet_frame(c, 0.0)
print("helix curvatures:", np.round(f.curvatures, 6))
print(f"structure-equation residual: {frenet_residual(c, 0.0):.1e}")

r = reversed_curve(c, steps=1000)
print("reversed curve curvatures at s=0.5:", np.round(frenet_frame(r, 0.5).curvatures, 6))
e1 = frenet_frame(c, 0.5).frame[0]
print(f"|<gamma~', e1>|, |<gamma~'', e1>|: {np.abs(r.derivatives(0.5, 2) @ e1).round(8)}")

# gamma' = e^{tA} v is nondegenerate exactly when v is cyclic for A.
grid = np.linspace(-1, 1, 5)
for rates, v in [([1.0, 2.0], [1, 0, 1, 0]), ([1.0, 2.0], [1, 0, 0, 0]), ([1.0, 1.0], [1, 0, 1, 0])]:
    a = block_skew(rates)
    c = one_param_curve(a, np.array(v, dtype=float))
    print(f"rates {rates}, v {v}: cyclic={cyclic_vector_check(a, v)}, nondegenerate={nondegeneracy_check(c, grid)['passed']}")

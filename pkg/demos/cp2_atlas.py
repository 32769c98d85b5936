"""Walk through the three charts of the projective plane.

The triangle with vertices (0,0), (1,0), (0,1) is cut out by
x >= 0, y >= 0, 1 - x - y >= 0.  Each vertex gives a chart C^2, and a point
seen from one vertex can be carried to the others.

    python demos/cp2_atlas.py
"""
import numpy as np

from delzant import chart_point, mu_v, phi, simplex, theta, toric_transition
from delzant.transitions import laurent_map

P = simplex(2, [1, 0, 0])

print("vertices")
for v in P.vertices:
    print(f"  {v.id}: position {tuple(str(x) for x in v.position)}, facets {v.facets}")

origin = P.vertex_at([0, 0]).id
z = chart_point(P, origin, [0.4 + 0.2j, 0.5j])
print(f"\na point in the chart at the origin: {z}")
print(f"its momentum: {mu_v(P, z)}")

for w in P.vertex_ids:
    if w == origin:
        continue
    zw = phi(P, z, w)
    # the momentum does not depend on which chart we read it in
    print(f"\nseen from {w}: {zw}")
    print(f"  momentum {mu_v(P, zw)}")
    L = laurent_map(P, origin, w)
    print(f"  toric transition exponents {L.exponents}")
    # the toric coordinates transform by a monomial map
    lhs = theta(P, zw).z
    rhs = toric_transition(P, theta(P, z), w).z
    print(f"  |theta(phi z) - T(theta z)| = {np.max(np.abs(lhs - rhs)):.2e}")

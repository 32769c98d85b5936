"""Sample chart points and look at where their momenta land.

Random points of each chart are mapped by the moment map; every image lies
in the polytope and stays the sampling margin away from the facets that do
not pass through the chart's vertex.  With matplotlib installed the images
are drawn per chart; otherwise a text summary is printed.

    python demos/sample_momentum_image.py [out.png]
"""
import sys

import numpy as np

from delzant import hirzebruch, mu_v
from delzant.verify import generator, sample_chart_points

P = hirzebruch(1, [1, 1, 1, 1])
margin = 0.05 * P.inradius()
images = {}
for v in P.vertex_ids:
    pts = sample_chart_points(P, v, 400, margin, generator(0, "demo", (v,)))
    images[v] = np.array([mu_v(P, z) for z in pts])
    xi = images[v]
    print(f"{v} at {tuple(str(x) for x in P.vertex(v).position)}: "
          f"x in [{xi[:, 0].min():.3f}, {xi[:, 0].max():.3f}], y in [{xi[:, 1].min():.3f}, {xi[:, 1].max():.3f}]")

if len(sys.argv) > 1:
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    fig, ax = plt.subplots(figsize=(5, 5))
    corners = [v.position for v in P.vertices]
    for v, xi in images.items():
        ax.scatter(xi[:, 0], xi[:, 1], s=4, label=v)
    ax.scatter([float(c[0]) for c in corners], [float(c[1]) for c in corners], c="k", marker="x")
    ax.set_aspect("equal")
    ax.legend()
    fig.savefig(sys.argv[1], dpi=120)
    print(f"wrote {sys.argv[1]}")

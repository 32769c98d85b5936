"""Charts and transition maps for Delzant spaces."""
from .polytope import (DelzantPolytope, Facet, InvalidPolytopeError, Vertex, Violation,
                       build, hirzebruch, simplex, unit_cube)
from .charts import (AmbientPoint, ChartPoint, act, ambient_point, chart_point, in_U_v, in_Z,
                     mu_v, r_f, section_s_v, stratum_of)
from .transitions import (SolverConfig, cpn_theta, cpn_theta_inverse, hirzebruch_t2, mu_toric,
                          phi, theta, theta_inverse, toric_transition)

__version__ = "0.1.0"

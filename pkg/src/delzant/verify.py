"""Randomized checks of the identities satisfied by the chart atlas.

Every check draws from its own Philox generator, keyed by the suite seed, the
check name and the vertex tuple, so reports do not depend on execution order.
"""
from __future__ import annotations

import hashlib
import json
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from itertools import product
from typing import Callable, Iterable, Sequence

import numpy as np

from . import charts, transitions
from .charts import ChartPoint
from .polytope import DelzantPolytope

TOLERANCES = {
    "cocycle": 1e-9,
    "symplectic": 1e-5,
    "momentum": 1e-10,
    "intertwine": 1e-8,
    "equivariance": 1e-10,
    "theta_roundtrip": 1e-8,
    "solver_residual": 1e-12,
    "surjectivity": 1e-10,
    "section": 1e-10,
    "strata": 0.0,
    "momentum_invariance": 1e-12,
    "vertex_momentum": 1e-14,
}
REQUIRED_CHECKS = frozenset(TOLERANCES)

FD_STEP = 1e-6


class SamplingError(ValueError):
    """The margin leaves nothing to sample."""


@dataclass(frozen=True)
class SampleConfig:
    count: int = 100
    seed: int = 0
    margin: float | None = None  # distance from excluded facets and floor on |z_f|; None -> 0.05 * inradius

    def __post_init__(self):
        if self.count < 1:
            raise ValueError("count must be at least 1")
        if self.margin is not None and not self.margin > 0:
            raise ValueError("margin must be positive")

    def margin_for(self, P: DelzantPolytope) -> float:
        return self.margin if self.margin is not None else 0.05 * P.inradius()


@dataclass
class CheckReport:
    check: str
    vertices: tuple[str, ...]
    samples: int
    max_error: float
    tolerance: float
    passed: bool
    worst_input: dict | None = None

    def to_json(self) -> str:
        d = asdict(self)
        d["vertices"] = list(self.vertices)
        d["pass"] = d.pop("passed")
        return json.dumps(d, sort_keys=True)


def point_to_json(z: ChartPoint) -> dict:
    return {"vertex": z.vertex, "coords": {f: [x.real, x.imag] for f, x in z.as_dict().items()}}


def generator(seed: int, check: str, vertices: Sequence[str]) -> np.random.Generator:
    """Philox generator private to one check."""
    digest = hashlib.sha256(f"{check}|{'|'.join(vertices)}".encode()).digest()
    words = [int.from_bytes(digest[i:i + 4], "little") for i in range(0, 16, 4)]
    return np.random.Generator(np.random.Philox(np.random.SeedSequence([seed & (2**64 - 1), *words])))


# ---------------------------------------------------------------------------
# sampling
# ---------------------------------------------------------------------------

def slack_floor(P: DelzantPolytope, v: str, margin: float, overlap: Iterable[str] = ()) -> np.ndarray:
    """Lower bounds on ``<X_f, xi> + lambda_f``, one per facet, that encode the margin.

    Facets not through ``v`` must be at Euclidean distance ``margin`` from
    ``xi``.  Facets through ``v`` but missing from some vertex in ``overlap``
    need ``|z_f| = r_f(xi) >= margin``.  The rest are unconstrained.
    """
    through_v = set(P.vertex(v).facets)
    keep = set(through_v)
    for w in overlap:
        keep &= set(P.vertex(w).facets)
    out = np.zeros(len(P.facets))
    for i, f in enumerate(P.facets):
        if f.id not in through_v:
            out[i] = margin * float(np.linalg.norm(np.asarray(f.normal, dtype=float)))
        elif f.id not in keep:
            out[i] = margin ** 2 / 2
    return out


def sample_momenta(P: DelzantPolytope, v: str, count: int, margin: float,
                   rng: np.random.Generator, overlap: Iterable[str] = ()) -> np.ndarray:
    """Uniform draws of ``xi`` in the polytope respecting :func:`slack_floor`."""
    normals = np.array([f.normal for f in P.facets], dtype=float)
    offsets = np.array([float(f.offset) for f in P.facets])
    floor = slack_floor(P, v, margin, overlap)
    lo, hi = P.bounding_box()
    out = []
    tries = 0
    while len(out) < count:
        batch = rng.uniform(lo, hi, size=(max(64, 4 * count), P.dim))
        slack = batch @ normals.T + offsets
        ok = np.all(slack >= floor, axis=1)
        out.extend(batch[ok])
        tries += len(batch)
        if not out and tries > 200_000:
            raise SamplingError(f"margin {margin} leaves no room to sample chart {v}")
    return np.array(out[:count])


def sample_chart_points(P: DelzantPolytope, v: str, count: int, margin: float,
                        rng: np.random.Generator, overlap: Iterable[str] = ()) -> list[ChartPoint]:
    xis = sample_momenta(P, v, count, margin, rng, overlap)
    phases = rng.uniform(0, 1, size=(count, P.dim))
    return [charts.point_over(P, v, xi, ph) for xi, ph in zip(xis, phases)]


def sample_chart_point(P: DelzantPolytope, v: str, cfg: SampleConfig,
                       require_overlap_with: str | None = None,
                       rng: np.random.Generator | None = None) -> ChartPoint:
    rng = rng if rng is not None else generator(cfg.seed, "sample", (v,))
    overlap = () if require_overlap_with is None else (require_overlap_with,)
    return sample_chart_points(P, v, 1, cfg.margin_for(P), rng, overlap)[0]


# ---------------------------------------------------------------------------
# checks
# ---------------------------------------------------------------------------

def _inf(a, b) -> float:
    return float(np.max(np.abs(np.asarray(a) - np.asarray(b)))) if len(a) else 0.0


def _run(name: str, vertices: tuple[str, ...], points: Sequence[ChartPoint],
         error: Callable[[ChartPoint], float], tol: float | None) -> CheckReport:
    tol = TOLERANCES[name] if tol is None else tol
    worst, worst_err = None, 0.0
    for z in points:
        e = error(z)
        if np.isnan(e):
            e = np.inf
        if worst is None or e > worst_err:
            worst, worst_err = z, e
    return CheckReport(name, vertices, len(points), worst_err, tol, bool(worst_err <= tol),
                       point_to_json(worst) if worst is not None else None)


def _points(P, name, verts, cfg, overlap):
    rng = generator(cfg.seed, name, verts)
    return sample_chart_points(P, verts[0], cfg.count, cfg.margin_for(P), rng, overlap), rng


def check_cocycle(P: DelzantPolytope, u: str, v: str, w: str, cfg: SampleConfig,
                  tol: float | None = None) -> CheckReport:
    """``phi_{w,v} o phi_{v,u} = phi_{w,u}`` on the triple overlap."""
    verts = (u, v, w)
    pts, _ = _points(P, "cocycle", verts, cfg, (v, w))

    def err(z):
        return _inf(transitions.phi(P, transitions.phi(P, z, v), w).z, transitions.phi(P, z, w).z)

    return _run("cocycle", verts, pts, err, tol)


def omega(n: int) -> np.ndarray:
    """Canonical form in interleaved coordinates ``(x1, y1, x2, y2, ...)``."""
    return np.kron(np.eye(n), np.array([[0.0, 1.0], [-1.0, 0.0]]))


def real_jacobian(f: Callable[[np.ndarray], np.ndarray], z: np.ndarray, h: float = FD_STEP) -> np.ndarray:
    """Central-difference Jacobian of a map ``C^n -> C^m`` in interleaved real coordinates."""
    def to_real(c):
        return np.column_stack([c.real, c.imag]).reshape(-1)

    n = len(z)
    cols = []
    for k in range(2 * n):
        dz = np.zeros(n, dtype=complex)
        dz[k // 2] = h if k % 2 == 0 else 1j * h
        cols.append((to_real(f(z + dz)) - to_real(f(z - dz))) / (2 * h))
    return np.column_stack(cols)


def check_symplectic(P: DelzantPolytope, v: str, w: str, cfg: SampleConfig,
                     tol: float | None = None, h: float = FD_STEP) -> CheckReport:
    """Finite-difference test that ``phi_{w,v}`` preserves the standard symplectic form."""
    verts = (v, w)
    pts, _ = _points(P, "symplectic", verts, cfg, (w,))
    Om = omega(P.dim)
    facets = P.vertex(v).facets

    def err(z):
        J = real_jacobian(lambda x: transitions.phi(P, ChartPoint(v, facets, x), w).z, z.z, h)
        return float(np.max(np.abs(J.T @ Om @ J - Om)))

    return _run("symplectic", verts, pts, err, tol)


def check_momentum(P: DelzantPolytope, v: str, w: str, cfg: SampleConfig,
                   tol: float | None = None) -> CheckReport:
    verts = (v, w)
    pts, _ = _points(P, "momentum", verts, cfg, (w,))

    def err(z):
        return _inf(charts.mu_v(P, z), charts.mu_v(P, transitions.phi(P, z, w)))

    return _run("momentum", verts, pts, err, tol)


def check_intertwine(P: DelzantPolytope, v: str, w: str, cfg: SampleConfig,
                     tol: float | None = None) -> CheckReport:
    """``theta_w o phi_{w,v} = L_{w,v} o theta_v``."""
    verts = (v, w)
    pts, _ = _points(P, "intertwine", verts, cfg, (w,))

    def err(z):
        lhs = transitions.theta(P, transitions.phi(P, z, w))
        rhs = transitions.toric_transition(P, transitions.theta(P, z), w)
        return _inf(lhs.z, rhs.z)

    return _run("intertwine", verts, pts, err, tol)


def check_equivariance(P: DelzantPolytope, v: str, w: str, cfg: SampleConfig,
                       tol: float | None = None, angles: Sequence[Sequence[float]] | None = None
                       ) -> CheckReport:
    """``phi(a . z) = a' . phi(z)`` with ``a'`` the transported angle vector."""
    verts = (v, w)
    pts, rng = _points(P, "equivariance", verts, cfg, (w,))
    if angles is None:
        angles = rng.uniform(0, 1, size=(len(pts), P.dim))
    pairs = dict(zip(map(id, pts), angles))

    def err(z):
        a = pairs[id(z)]
        lhs = transitions.phi(P, charts.act(a, z), w)
        rhs = charts.act(transitions.transport_angles(P, v, w, a), transitions.phi(P, z, w))
        return _inf(lhs.z, rhs.z)

    return _run("equivariance", verts, pts, err, tol)


# -- single-chart checks ---------------------------------------------------------

def check_theta_roundtrip(P: DelzantPolytope, v: str, cfg: SampleConfig,
                          tol: float | None = None,
                          solver: transitions.SolverConfig = transitions.DEFAULT_SOLVER
                          ) -> tuple[CheckReport, CheckReport]:
    """``theta_v^{-1} o theta_v = id``; also reports the worst solver residual."""
    pts, _ = _points(P, "theta_roundtrip", (v,), cfg, ())
    residuals: dict[int, float] = {}

    def err(z):
        zeta = transitions.theta(P, z)
        residuals[id(z)] = transitions.solve_momentum(P, zeta, solver).residual
        return _inf(transitions.theta_inverse(P, zeta, solver).z, z.z)

    rt = _run("theta_roundtrip", (v,), pts, err, tol)
    res = _run("solver_residual", (v,), pts, lambda z: residuals[id(z)], None)
    return rt, res


def momentum_grid(P: DelzantPolytope, v: str, per_axis: int, margin: float) -> np.ndarray:
    """Points of a ``per_axis ** n`` grid over the bounding box inside the margin-shrunk chart image."""
    lo, hi = P.bounding_box()
    axes = [np.linspace(a, b, per_axis) for a, b in zip(lo, hi)]
    grid = np.array(list(product(*axes)))
    normals = np.array([f.normal for f in P.facets], dtype=float)
    offsets = np.array([float(f.offset) for f in P.facets])
    floor = slack_floor(P, v, margin)
    slack = grid @ normals.T + offsets
    return grid[np.all(slack >= floor - 1e-15, axis=1)]


def check_surjectivity(P: DelzantPolytope, v: str, cfg: SampleConfig, per_axis: int = 20,
                       tol: float | None = None) -> CheckReport:
    """``z_f = r_f(xi)`` reproduces ``xi`` through ``mu_v`` and through the level set."""
    xis = momentum_grid(P, v, per_axis, cfg.margin_for(P))
    tol = TOLERANCES["surjectivity"] if tol is None else tol
    worst, worst_err = None, 0.0
    for xi in xis:
        z = charts.point_over(P, v, xi)
        back = charts.in_Z(P, charts.section_s_v(P, z))
        e = np.inf if back is None else max(_inf(charts.mu_v(P, z), xi), _inf(back, xi))
        if worst is None or e > worst_err:
            worst, worst_err = z, e
    return CheckReport("surjectivity", (v,), len(xis), float(worst_err), tol, bool(worst_err <= tol),
                       point_to_json(worst) if worst is not None else None)


def check_section(P: DelzantPolytope, v: str, cfg: SampleConfig, tol: float | None = None) -> CheckReport:
    """``s_v`` agrees with ``z`` on ``F_v``, is real and positive elsewhere, and lands in ``Z``."""
    pts, _ = _points(P, "section", (v,), cfg, ())
    cd = P.chart_data(v)
    idx = [P.facet_ids.index(f) for f in cd.facets]
    oidx = [P.facet_ids.index(f) for f in cd.others]

    def err(z):
        s = charts.section_s_v(P, z)
        if not np.array_equal(s.z[idx], z.z):
            return np.inf
        off = s.z[oidx]
        if np.any(off.imag != 0) or np.any(off.real <= 0):
            return np.inf
        xi = charts.in_Z(P, s)
        return np.inf if xi is None else _inf(xi, charts.mu_v(P, z))

    return _run("section", (v,), pts, err, tol)


def check_strata(P: DelzantPolytope, v: str, cfg: SampleConfig, tol: float | None = None) -> CheckReport:
    """``stratum_of`` equals the face of ``mu_v(z)``; about half the coordinates are zeroed.

    The error of a sample is the size of the symmetric difference.
    """
    rng = generator(cfg.seed, "strata", (v,))
    margin = cfg.margin_for(P)
    cd = P.chart_data(v)
    floor = slack_floor(P, v, margin)[[P.facet_ids.index(f) for f in cd.others]]
    pts: list[ChartPoint] = []
    while len(pts) < cfg.count:
        for z in sample_chart_points(P, v, cfg.count, margin, rng):
            zero = rng.uniform(size=P.dim) < 0.5
            zz = ChartPoint(v, cd.facets, np.where(zero, 0, z.z))
            if np.all(charts.other_slacks(P, v, charts.mu_v(P, zz)) >= floor):
                pts.append(zz)
    pts = pts[:cfg.count]

    def err(z):
        a = charts.stratum_of(P, z)
        b = P.face_containing(charts.mu_v(P, z), tol=charts.TOL)
        return float(len(a ^ b))

    return _run("strata", (v,), pts, err, tol)


def check_momentum_invariance(P: DelzantPolytope, v: str, cfg: SampleConfig,
                              tol: float | None = None) -> CheckReport:
    pts, rng = _points(P, "momentum_invariance", (v,), cfg, ())
    angles = dict(zip(map(id, pts), rng.uniform(0, 1, size=(len(pts), P.dim))))

    def err(z):
        return _inf(charts.mu_v(P, charts.act(angles[id(z)], z)), charts.mu_v(P, z))

    return _run("momentum_invariance", (v,), pts, err, tol)


def check_vertex_momentum(P: DelzantPolytope, v: str, tol: float | None = None) -> CheckReport:
    """``mu_v(0)`` equals the vertex: rational reconstruction matches, float error within tol."""
    vert = P.vertex(v)
    zero = charts.chart_point(P, v, np.zeros(P.dim))
    xi = charts.mu_v(P, zero)
    exact = all(Fraction(float(x)).limit_denominator(10**9) == q for x, q in zip(xi, vert.position))
    e = _inf(xi, [float(q) for q in vert.position]) if exact else np.inf
    tol = TOLERANCES["vertex_momentum"] if tol is None else tol
    return CheckReport("vertex_momentum", (v,), 1, e, tol, bool(e <= tol), point_to_json(zero))


# ---------------------------------------------------------------------------
# suite
# ---------------------------------------------------------------------------

@dataclass
class SuiteResult:
    reports: list[CheckReport] = field(default_factory=list)
    missing: frozenset = frozenset()

    @property
    def passed(self) -> bool:
        return not self.missing and all(r.passed for r in self.reports)

    def by_check(self, name: str) -> list[CheckReport]:
        return [r for r in self.reports if r.check == name]

    def worst(self, name: str) -> float:
        return max((r.max_error for r in self.by_check(name)), default=0.0)


def run_suite(P: DelzantPolytope, cfg: SampleConfig = SampleConfig(),
              tolerance: float | None = None, theta_samples: int | None = None) -> SuiteResult:
    """Run every check over all vertices, ordered pairs and ordered triples.

    ``tolerance`` overrides every per-check tolerance.
    """
    verts = P.vertex_ids
    tol = tolerance
    reports: list[CheckReport] = []
    for v in verts:
        reports.append(check_vertex_momentum(P, v, tol))
        tcfg = cfg if theta_samples is None else SampleConfig(theta_samples, cfg.seed, cfg.margin)
        reports.extend(check_theta_roundtrip(P, v, tcfg, tol))
        reports.append(check_surjectivity(P, v, cfg, tol=tol))
        reports.append(check_section(P, v, cfg, tol))
        reports.append(check_strata(P, v, cfg, tol))
        reports.append(check_momentum_invariance(P, v, cfg, tol))
    for v, w in product(verts, repeat=2):
        reports.append(check_symplectic(P, v, w, cfg, tol))
        reports.append(check_momentum(P, v, w, cfg, tol))
        reports.append(check_intertwine(P, v, w, cfg, tol))
        reports.append(check_equivariance(P, v, w, cfg, tol))
    for u, v, w in product(verts, repeat=3):
        reports.append(check_cocycle(P, u, v, w, cfg, tol))
    missing = REQUIRED_CHECKS - {r.check for r in reports}
    return SuiteResult(reports, frozenset(missing))

"""Reduced-phase-space charts ``U_v`` of a Delzant polytope.

A chart point for vertex ``v`` has one complex coordinate per facet through
``v``, stored in the polytope's order for ``F_v``.  The momentum map of the
chart is affine in ``|z_f|^2``:

    |z_f|^2 / 2 - lambda_f = <X_f, mu_v(z)>,   f in F_v

and ``U_v`` is the set of ``z`` whose momentum avoids every facet not through
``v``.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from .polytope import DelzantPolytope, FaceId

TOL = 1e-9


class ChartError(ValueError):
    """A point does not belong to the domain a map requires."""


class PointOutsideDelta(ChartError):
    pass


@dataclass(frozen=True, eq=False)
class ChartPoint:
    """Complex coordinates ``z_f``, ``f`` in ``F_v``, for the chart at ``vertex``."""

    vertex: str
    facets: tuple[str, ...]
    z: np.ndarray

    def __post_init__(self):
        z = np.asarray(self.z, dtype=complex).reshape(-1)
        if len(z) != len(self.facets):
            raise ValueError("coordinate count does not match facet count")
        z.setflags(write=False)
        object.__setattr__(self, "z", z)

    def __getitem__(self, fid: str) -> complex:
        return complex(self.z[self.facets.index(fid)])

    def as_dict(self) -> dict[str, complex]:
        return {f: complex(x) for f, x in zip(self.facets, self.z)}

    def __repr__(self):
        body = ", ".join(f"{f}={complex(x):.6g}" for f, x in zip(self.facets, self.z))
        return f"ChartPoint({self.vertex}: {body})"


@dataclass(frozen=True, eq=False)
class AmbientPoint:
    """A point of ``C^F``, one coordinate per facet in polytope order."""

    facets: tuple[str, ...]
    z: np.ndarray

    def __post_init__(self):
        z = np.asarray(self.z, dtype=complex).reshape(-1)
        if len(z) != len(self.facets):
            raise ValueError("coordinate count does not match facet count")
        z.setflags(write=False)
        object.__setattr__(self, "z", z)

    def __getitem__(self, fid: str) -> complex:
        return complex(self.z[self.facets.index(fid)])

    def as_dict(self) -> dict[str, complex]:
        return {f: complex(x) for f, x in zip(self.facets, self.z)}


def chart_point(P: DelzantPolytope, v: str, values) -> ChartPoint:
    """Build a chart point from a mapping ``{facet: value}`` or a sequence in ``F_v`` order."""
    facets = P.vertex(v).facets
    if isinstance(values, Mapping):
        if set(values) != set(facets):
            raise ValueError(f"chart {v} needs coordinates for {list(facets)}, got {sorted(values)}")
        z = [values[f] for f in facets]
    else:
        z = np.atleast_1d(np.asarray(values, dtype=complex))
        if len(z) != len(facets):
            raise ValueError(f"chart {v} has {len(facets)} coordinates, got {len(z)}")
    return ChartPoint(v, facets, np.asarray(z, dtype=complex))


def ambient_point(P: DelzantPolytope, values) -> AmbientPoint:
    facets = P.facet_ids
    if isinstance(values, Mapping):
        if set(values) != set(facets):
            raise ValueError(f"ambient point needs coordinates for {list(facets)}")
        values = [values[f] for f in facets]
    return AmbientPoint(facets, np.asarray(values, dtype=complex))


def _check(P: DelzantPolytope, z: ChartPoint):
    cd = P.chart_data(z.vertex)
    if z.facets != cd.facets:
        raise ValueError(f"key set {list(z.facets)} does not match chart {z.vertex} ({list(cd.facets)})")
    return cd


# ---------------------------------------------------------------------------
# momentum
# ---------------------------------------------------------------------------

def mu_v(P: DelzantPolytope, z: ChartPoint) -> np.ndarray:
    """Momentum of a chart point, as coordinates of ``xi`` in the dual lattice basis."""
    cd = _check(P, z)
    return cd.basis_inv @ (np.abs(z.z) ** 2 / 2 - cd.offsets)


def facet_slack(P: DelzantPolytope, f: str, xi) -> float:
    facet = P.facet(f)
    return float(np.dot(facet.normal, xi)) + float(facet.offset)


def r_f(P: DelzantPolytope, f: str, xi, tol: float = TOL) -> float:
    """``sqrt(2 (<X_f, xi> + lambda_f))``; slacks in ``[-tol, 0]`` give 0."""
    s = facet_slack(P, f, xi)
    if s < -tol:
        raise PointOutsideDelta(f"<X_{f}, xi> + lambda_{f} = {s:.3g} < 0")
    return float(np.sqrt(2 * max(s, 0.0)))


def other_slacks(P: DelzantPolytope, v: str, xi) -> np.ndarray:
    """Slacks of ``xi`` on the facets not through ``v``, in ``P.delta_v_facets(v)`` order."""
    cd = P.chart_data(v)
    return cd.other_normals @ np.asarray(xi, dtype=float) + cd.other_offsets


def chart_slacks(P: DelzantPolytope, z: ChartPoint) -> np.ndarray:
    """Slacks of ``mu_v(z)`` on the facets not through the vertex, straight from ``|z|^2``.

    Uses ``X_f' = sum_f (v)^f_f' X_f``, so the slack is affine in ``|z_f|^2``
    with integer coefficients and the vertex's own slack as constant term.
    Avoids forming ``xi`` and loses less to cancellation near a facet.
    """
    cd = _check(P, z)
    return cd.exponents @ (np.abs(z.z) ** 2 / 2) + cd.corner_slack


def in_U_v(P: DelzantPolytope, z: ChartPoint, tol: float = TOL) -> bool:
    """True iff ``mu_v(z)`` lies in the polytope minus the facets not through the vertex."""
    _check(P, z)
    return bool(np.all(other_slacks(P, z.vertex, mu_v(P, z)) > tol))


def in_closure_U_v(P: DelzantPolytope, z: ChartPoint, tol: float = TOL) -> bool:
    _check(P, z)
    return bool(np.all(other_slacks(P, z.vertex, mu_v(P, z)) >= -tol))


# ---------------------------------------------------------------------------
# the level set Z and the section
# ---------------------------------------------------------------------------

def section_s_v(P: DelzantPolytope, z: ChartPoint, tol: float = TOL) -> AmbientPoint:
    """Lift ``z`` into the level set: ``z`` on ``F_v``, ``r_f'(mu_v(z)) >= 0`` elsewhere.

    Defined on the closure of ``U_v``; zero radii appear on its boundary.
    """
    cd = _check(P, z)
    s = other_slacks(P, z.vertex, mu_v(P, z))
    if np.any(s < -tol):
        bad = [f for f, x in zip(cd.others, s) if x < -tol]
        raise PointOutsideDelta(f"mu_v(z) violates facets {bad}")
    radii = np.sqrt(2 * np.maximum(s, 0.0))
    full = dict(zip(cd.facets, z.z))
    full.update(zip(cd.others, radii))
    return AmbientPoint(P.facet_ids, np.array([full[f] for f in P.facet_ids], dtype=complex))


def in_Z(P: DelzantPolytope, z: AmbientPoint, tol: float = TOL) -> np.ndarray | None:
    """The ``xi`` with ``|z_f|^2/2 - lambda_f = <X_f, xi>`` for every facet, or None.

    Solves the equations of one vertex's facets and checks the residuals of
    the rest against ``tol``.
    """
    if tuple(z.facets) != P.facet_ids:
        raise ValueError("ambient point key set does not match the polytope facets")
    v0 = P.vertices[0].id
    cd = P.chart_data(v0)
    lhs = dict(zip(z.facets, np.abs(z.z) ** 2 / 2))
    xi = cd.basis_inv @ (np.array([lhs[f] for f in cd.facets]) - cd.offsets)
    for f in cd.others:
        facet = P.facet(f)
        if abs(lhs[f] - float(facet.offset) - float(np.dot(facet.normal, xi))) > tol:
            return None
    return xi


# ---------------------------------------------------------------------------
# strata and the torus action
# ---------------------------------------------------------------------------

def stratum_of(P: DelzantPolytope, z: ChartPoint, tol: float = TOL) -> FaceId:
    """Facets ``f`` in ``F_v`` with ``|z_f| < tol``: the open face containing ``mu_v(z)``."""
    _check(P, z)
    return frozenset(f for f, x in zip(z.facets, z.z) if abs(x) < tol)


def act(angles, z: ChartPoint) -> ChartPoint:
    """Rotate ``z_f`` by ``exp(2 pi i a_f)``; ``angles`` is a mapping or a sequence in chart order."""
    if isinstance(angles, Mapping):
        if set(angles) != set(z.facets):
            raise ValueError("angle keys do not match chart coordinates")
        a = np.array([angles[f] for f in z.facets], dtype=float)
    else:
        a = np.asarray(angles, dtype=float).reshape(-1)
        if len(a) != len(z.facets):
            raise ValueError("angle vector length does not match chart dimension")
    return ChartPoint(z.vertex, z.facets, np.exp(2j * np.pi * a) * z.z)


def point_over(P: DelzantPolytope, v: str, xi, phases=None) -> ChartPoint:
    """The chart point with ``|z_f| = r_f(xi)`` and the given phases (fractions of a turn)."""
    cd = P.chart_data(v)
    s = cd.basis @ np.asarray(xi, dtype=float) + cd.offsets
    if np.any(s < -TOL):
        raise PointOutsideDelta("xi is outside the polytope")
    mod = np.sqrt(2 * np.maximum(s, 0.0))
    if phases is not None:
        mod = mod * np.exp(2j * np.pi * np.asarray(phases, dtype=float))
    return ChartPoint(v, cd.facets, mod)

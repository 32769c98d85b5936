"""Delzant polytopes given by facet inequalities ``<X_f, xi> + lambda_f >= 0``.

Vertices are enumerated exactly over the rationals.  A polytope that fails
any Delzant condition is rejected with the complete list of violations.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Iterable, Sequence

import numpy as np

from . import lattice
from .lattice import IntegerMatrix

FaceId = frozenset  # set of facet ids whose hyperplanes contain the face; empty = interior


def as_rational(x) -> Fraction:
    """Parse an int, Fraction, or ``"p/q"`` string into a Fraction.

    Floats are rejected: offsets must be given exactly.
    """
    if isinstance(x, Fraction):
        return x
    if isinstance(x, bool):
        raise TypeError("bool is not a rational")
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x.strip())
    raise TypeError(f"cannot use {x!r} as an exact rational")


def format_rational(q: Fraction) -> str:
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


@dataclass(frozen=True)
class Facet:
    id: str
    normal: tuple[int, ...]
    offset: Fraction

    @classmethod
    def make(cls, id: str, normal: Iterable[int], offset) -> "Facet":
        return cls(str(id), tuple(int(x) for x in normal), as_rational(offset))

    def slack(self, xi: Sequence) -> Fraction:
        """``<X_f, xi> + lambda_f``; exact for rational input."""
        return sum((a * x for a, x in zip(self.normal, xi)), Fraction(0)) + self.offset


@dataclass(frozen=True)
class Vertex:
    id: str
    position: tuple[Fraction, ...]
    facets: tuple[str, ...]
    determinant: int


@dataclass(frozen=True)
class Violation:
    kind: str
    message: str
    facet: str | None = None
    position: tuple[Fraction, ...] | None = None
    facets: tuple[str, ...] = ()
    determinant: int | None = None

    def __str__(self):
        return f"{self.kind}: {self.message}"


class InvalidPolytopeError(ValueError):
    def __init__(self, violations: Sequence[Violation]):
        self.violations = list(violations)
        super().__init__("; ".join(str(v) for v in self.violations))

    @property
    def kinds(self) -> set[str]:
        return {v.kind for v in self.violations}


@dataclass(frozen=True)
class BaseChange:
    """Integer matrix ``(w)_f^g`` with ``X_f = sum_g (w)_f^g X_g``.

    Rows are keyed by ``f`` in ``F_v`` and columns by ``g`` in ``F_w``.
    The matrix for ``u -> w`` equals ``BC(u -> v).rows @ BC(v -> w).rows``.
    """

    from_vertex: str
    to_vertex: str
    matrix: IntegerMatrix

    def coeff(self, f: str, g: str) -> int:
        return self.matrix[f, g]


@dataclass
class ChartData:
    """Per-vertex numeric tables, computed once at build time."""

    facets: tuple[str, ...]           # F_v in build order
    others: tuple[str, ...]           # F \ F_v in build order
    basis: np.ndarray                 # rows X_f, f in F_v  (n x n)
    basis_inv: np.ndarray             # exact integer inverse as floats
    offsets: np.ndarray               # lambda_f, f in F_v
    other_normals: np.ndarray         # rows X_f', f' not in F_v
    other_offsets: np.ndarray         # lambda_f', f' not in F_v
    exponents: np.ndarray             # (v)^f_{f'}: row f' not in F_v, column f in F_v
    position: np.ndarray              # the vertex as floats
    corner_slack: np.ndarray          # r_{f'}(v)^2 / 2 for f' not in F_v
    exponent_rows: tuple[tuple[int, ...], ...] = field(default=())


def _fractions_to_float(xs) -> np.ndarray:
    return np.array([float(x) for x in xs], dtype=float)


class DelzantPolytope:
    """A validated Delzant polytope.

    Build instances with :func:`build`, :func:`simplex`, or :func:`hirzebruch`.
    Treat them as immutable.
    """

    def __init__(self, dim: int, facets: Sequence[Facet], vertices: Sequence[Vertex]):
        self.dim = dim
        self.facets = tuple(facets)
        self.vertices = tuple(vertices)
        self._facet_by_id = {f.id: f for f in self.facets}
        self._vertex_by_id = {v.id: v for v in self.vertices}
        self._chart: dict[str, ChartData] = {}
        self._base_change: dict[tuple[str, str], BaseChange] = {}
        for v in self.vertices:
            self._chart[v.id] = self._make_chart_data(v)

    # -- lookup -------------------------------------------------------------

    @property
    def facet_ids(self) -> tuple[str, ...]:
        return tuple(f.id for f in self.facets)

    @property
    def vertex_ids(self) -> tuple[str, ...]:
        return tuple(v.id for v in self.vertices)

    def facet(self, fid: str) -> Facet:
        try:
            return self._facet_by_id[fid]
        except KeyError:
            raise KeyError(f"unknown facet {fid!r}") from None

    def vertex(self, vid: str) -> Vertex:
        try:
            return self._vertex_by_id[vid]
        except KeyError:
            raise KeyError(f"unknown vertex {vid!r}") from None

    def chart_data(self, vid: str) -> ChartData:
        self.vertex(vid)
        return self._chart[vid]

    def vertex_at(self, position: Sequence) -> Vertex:
        pos = tuple(as_rational(x) if not isinstance(x, Fraction) else x for x in position)
        for v in self.vertices:
            if v.position == pos:
                return v
        raise KeyError(f"no vertex at {position}")

    def normal_matrix(self) -> IntegerMatrix:
        """The map ``t -> sum_f t_f X_f`` as an ``n x d`` matrix, columns keyed by facet."""
        cols = [f.normal for f in self.facets]
        return IntegerMatrix(lattice.transpose(cols), col_keys=self.facet_ids)

    def __repr__(self):
        return f"DelzantPolytope(dim={self.dim}, facets={len(self.facets)}, vertices={len(self.vertices)})"

    # -- combinatorics --------------------------------------------------------

    def adjacent(self, v: str, w: str) -> bool:
        """True when ``v != w`` are the two ends of an edge (share ``n - 1`` facets)."""
        if v == w:
            return False
        common = set(self.vertex(v).facets) & set(self.vertex(w).facets)
        return len(common) == self.dim - 1

    def base_change(self, v: str, w: str) -> BaseChange:
        key = (v, w)
        if key not in self._base_change:
            fv, fw = self.vertex(v).facets, self.vertex(w).facets
            basis = [self.facet(g).normal for g in fw]
            rows = tuple(lattice.base_change_coeffs(basis, self.facet(f).normal) for f in fv)
            self._base_change[key] = BaseChange(v, w, IntegerMatrix(rows, fv, fw))
        return self._base_change[key]

    def contains(self, xi: Sequence) -> bool:
        """Exact membership test for a rational point."""
        xi = self._check_point(xi)
        return all(f.slack(xi) >= 0 for f in self.facets)

    def face_containing(self, xi: Sequence, tol: float = 0.0) -> FaceId:
        """Facets whose hyperplane contains ``xi``; identifies the open face through ``xi``.

        With ``tol == 0`` the test is exact (floats are converted exactly).
        A positive ``tol`` treats slacks in ``[-tol, tol]`` as zero.
        """
        xi = self._check_point(xi)
        tight = []
        for f in self.facets:
            s = f.slack(xi)
            if s < -tol:
                raise ValueError(f"point {tuple(map(float, xi))} lies outside the polytope (facet {f.id})")
            if s <= tol:
                tight.append(f.id)
        return frozenset(tight)

    def delta_v_facets(self, v: str) -> tuple[str, ...]:
        """Facets removed from the polytope to obtain the chart image of ``v``."""
        return self.chart_data(v).others

    def _check_point(self, xi):
        xi = tuple(Fraction(x) for x in xi)
        if len(xi) != self.dim:
            raise ValueError(f"point has dimension {len(xi)}, polytope has {self.dim}")
        return xi

    # -- numeric tables -------------------------------------------------------

    def _make_chart_data(self, v: Vertex) -> ChartData:
        fv = v.facets
        others = tuple(f.id for f in self.facets if f.id not in fv)
        basis = [self.facet(f).normal for f in fv]
        inv = lattice.integer_inverse(basis)
        exps = tuple(lattice.base_change_coeffs(basis, self.facet(g).normal) for g in others)
        n = self.dim
        other_normals = np.array([self.facet(g).normal for g in others], dtype=float).reshape(len(others), n)
        corner = [self.facet(g).slack(v.position) for g in others]
        return ChartData(
            facets=fv,
            others=others,
            basis=np.array(basis, dtype=float),
            basis_inv=np.array(inv, dtype=float),
            offsets=_fractions_to_float(self.facet(f).offset for f in fv),
            other_normals=other_normals,
            other_offsets=_fractions_to_float(self.facet(g).offset for g in others),
            exponents=np.array(exps, dtype=float).reshape(len(others), n),
            position=_fractions_to_float(v.position),
            corner_slack=_fractions_to_float(corner),
            exponent_rows=exps,
        )

    # -- sampling support ---------------------------------------------------

    def barycenter(self) -> np.ndarray:
        return np.mean([_fractions_to_float(v.position) for v in self.vertices], axis=0)

    def bounding_box(self) -> tuple[np.ndarray, np.ndarray]:
        pts = np.array([_fractions_to_float(v.position) for v in self.vertices])
        return pts.min(axis=0), pts.max(axis=0)

    def inradius(self) -> float:
        """Radius of the largest Euclidean ball inside the polytope."""
        from scipy.optimize import linprog

        n = self.dim
        a = np.array([f.normal for f in self.facets], dtype=float)
        b = np.array([float(f.offset) for f in self.facets])
        norms = np.linalg.norm(a, axis=1)
        # maximize r subject to <X_f, c> + lambda_f >= r |X_f|
        a_ub = np.hstack([-a, norms[:, None]])
        res = linprog(np.r_[np.zeros(n), -1.0], A_ub=a_ub, b_ub=b,
                      bounds=[(None, None)] * n + [(0, None)], method="highs")
        if not res.success:
            raise RuntimeError(res.message)
        return float(res.x[-1])


# ---------------------------------------------------------------------------
# construction
# ---------------------------------------------------------------------------

def _recession_ray(normals: Sequence[tuple[int, ...]], n: int) -> tuple[int, ...] | None:
    """A nonzero ``u`` with ``<X_f, u> >= 0`` for all ``f``, or None if none exists.

    Assumes the normals have rank ``n``, so the recession cone is pointed and
    is nonzero exactly when it has an extreme ray.  Each extreme ray is the
    kernel of ``n - 1`` independent normals.
    """
    for sub in combinations(normals, n - 1):
        ray = _kernel_vector(sub, n)
        if ray is None:
            continue
        for u in (ray, tuple(-x for x in ray)):
            if all(sum(a * b for a, b in zip(x, u)) >= 0 for x in normals):
                return u
    return None


def _kernel_vector(rows: Sequence[tuple[int, ...]], n: int) -> tuple[int, ...] | None:
    """Generalized cross product of ``n - 1`` integer rows; None if dependent."""
    u = []
    for j in range(n):
        minor = [tuple(r[k] for k in range(n) if k != j) for r in rows]
        u.append((-1) ** j * lattice.det(minor))
    return tuple(u) if any(u) else None


def _affine_rank(points: Sequence[tuple[Fraction, ...]]) -> int:
    if not points:
        return -1
    p0 = points[0]
    diffs = [[a - b for a, b in zip(p, p0)] for p in points[1:]]
    rank = 0
    rows = [list(r) for r in diffs]
    ncols = len(p0)
    for c in range(ncols):
        piv = next((i for i in range(rank, len(rows)) if rows[i][c] != 0), None)
        if piv is None:
            continue
        rows[rank], rows[piv] = rows[piv], rows[rank]
        for i in range(rank + 1, len(rows)):
            f = rows[i][c] / rows[rank][c]
            rows[i] = [x - f * y for x, y in zip(rows[i], rows[rank])]
        rank += 1
    return rank


def _fmt_point(p) -> str:
    return "(" + ", ".join(format_rational(x) for x in p) + ")"


def find_violations(n: int, facets: Sequence[Facet]) -> tuple[list[Violation], list[Vertex]]:
    """Check the Delzant conditions; returns ``(violations, vertices)``."""
    if n < 1:
        raise ValueError("dimension must be at least 1")
    ids = [f.id for f in facets]
    if len(set(ids)) != len(ids):
        raise ValueError("facet ids are not distinct")
    for f in facets:
        if len(f.normal) != n:
            raise ValueError(f"facet {f.id}: normal has length {len(f.normal)}, expected {n}")
    facets = sorted(facets, key=lambda f: f.id)

    out: list[Violation] = []
    for f in facets:
        if not lattice.is_primitive(f.normal):
            out.append(Violation("NonPrimitiveNormal",
                                 f"facet {f.id}: normal {f.normal} is not primitive", facet=f.id))
    normals = [f.normal for f in facets]

    if _affine_rank([tuple(Fraction(x) for x in v) for v in [(0,) * n] + normals]) < n:
        out.append(Violation("Unbounded", "facet normals do not span the space"))
        return out, []
    ray = _recession_ray(normals, n)
    if ray is not None:
        out.append(Violation("Unbounded", f"recession direction {ray}"))
        return out, []

    # exact vertex enumeration over n-subsets of facets
    found: dict[tuple[Fraction, ...], None] = {}
    for sub in combinations(facets, n):
        a = [f.normal for f in sub]
        if lattice.det(a) == 0:
            continue
        xi = lattice.solve_rational(a, [-f.offset for f in sub])
        if xi in found:
            continue
        if all(g.slack(xi) >= 0 for g in facets):
            found[xi] = None
    positions = list(found)
    if not positions or _affine_rank(positions) < n:
        out.append(Violation("EmptyOrLowerDimensional",
                             "the inequalities do not define a full-dimensional polytope"))
        return out, []

    raw = []
    for xi in positions:
        tight = tuple(sorted(f.id for f in facets if f.slack(xi) == 0))
        if len(tight) != n:
            out.append(Violation("NonSimpleVertex",
                                 f"vertex {_fmt_point(xi)} lies on {len(tight)} facets {list(tight)}",
                                 position=xi, facets=tight))
            continue
        by_id = {f.id: f for f in facets}
        d = lattice.det([by_id[t].normal for t in tight])
        if abs(d) != 1:
            out.append(Violation("NonUnimodularVertex",
                                 f"vertex {_fmt_point(xi)}, facets {list(tight)}: det = {abs(d)}",
                                 position=xi, facets=tight, determinant=abs(d)))
        raw.append((tight, xi, d))

    touched = {t for tight, _, _ in raw for t in tight}
    touched |= {t for v in out for t in v.facets}
    for f in facets:
        if f.id not in touched:
            out.append(Violation("RedundantFacet", f"facet {f.id} contains no vertex", facet=f.id))

    raw.sort(key=lambda r: r[0])
    vertices = [Vertex(f"v{i}", xi, tight, d) for i, (tight, xi, d) in enumerate(raw)]
    return out, vertices


def build(n: int, facets: Iterable[Facet]) -> DelzantPolytope:
    """Validate facet data and return the polytope; raises :class:`InvalidPolytopeError`."""
    facets = sorted(facets, key=lambda f: f.id)
    violations, vertices = find_violations(n, facets)
    if violations:
        raise InvalidPolytopeError(violations)
    return DelzantPolytope(n, facets, vertices)


def simplex(n: int, lam: Sequence) -> DelzantPolytope:
    """Simplex with normals ``e_1, ..., e_n`` and ``e_0 = -(e_1 + ... + e_n)``.

    Facet ``fi`` carries offset ``lam[i]``.  Requires ``sum(lam) > 0``.
    """
    lam = [as_rational(x) for x in lam]
    if len(lam) != n + 1:
        raise ValueError(f"simplex in dimension {n} needs {n + 1} offsets")
    gamma = sum(lam)
    if gamma <= 0:
        raise InvalidPolytopeError([Violation(
            "EmptyOrLowerDimensional", f"sum of offsets is {format_rational(gamma)} <= 0")])
    facets = [Facet(f"f{0}", tuple([-1] * n), lam[0])]
    for i in range(1, n + 1):
        facets.append(Facet(f"f{i}", tuple(int(j == i - 1) for j in range(n)), lam[i]))
    return build(n, facets)


def hirzebruch_gammas(m: int, lam: Sequence) -> tuple[Fraction, Fraction]:
    """Lengths ``(top, bottom)`` of the two parallel edges of a Hirzebruch quadrangle.

    ``top = l1 + l3 + m l4`` lies on facet ``f4`` and ``bottom = l1 + l3 - m l2``
    on facet ``f2``; both are invariant under translating the polytope.
    """
    l1, l2, l3, l4 = (as_rational(x) for x in lam)
    return l1 + l3 + m * l4, l1 + l3 - m * l2


def hirzebruch(m: int, lam: Sequence) -> DelzantPolytope:
    """Quadrangle with normals ``e1, e2, -e1 + m e2, -e2`` (facets ``f1..f4``)."""
    if m < 0:
        raise ValueError("m must be nonnegative")
    lam = [as_rational(x) for x in lam]
    if len(lam) != 4:
        raise ValueError("a Hirzebruch quadrangle needs 4 offsets")
    top, bottom = hirzebruch_gammas(m, lam)
    height = lam[1] + lam[3]
    bad = [(name, val) for name, val in (("top edge", top), ("bottom edge", bottom), ("height", height))
           if val <= 0]
    if bad:
        msg = ", ".join(f"{name} = {format_rational(val)}" for name, val in bad)
        raise InvalidPolytopeError([Violation("EmptyOrLowerDimensional", f"not a quadrangle: {msg}")])
    normals = [(1, 0), (0, 1), (-1, m), (0, -1)]
    return build(2, [Facet(f"f{i + 1}", x, l) for i, (x, l) in enumerate(zip(normals, lam))])


def unit_cube(n: int) -> DelzantPolytope:
    """``[0, 1]^n``; facet ``lo{i}`` is ``x_i >= 0`` and ``hi{i}`` is ``1 - x_i >= 0``."""
    facets = []
    for i in range(n):
        e = tuple(int(j == i) for j in range(n))
        facets.append(Facet(f"lo{i + 1}", e, Fraction(0)))
        facets.append(Facet(f"hi{i + 1}", tuple(-x for x in e), Fraction(1)))
    return build(n, facets)

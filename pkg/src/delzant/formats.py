"""Reading and writing polytope files, chart-point files and numeric output.

Polytope files look like::

    {"dim": 2,
     "facets": [{"id": "f1", "X": [1, 0], "lambda": "1/2"}, ...]}

Chart points are ``{"vertex": "v0", "coords": {"f1": [re, im], ...}}``.
Floats are always written with 17 significant digits so they read back
bit-exactly; rationals are written as ``"p/q"`` strings (or ``"p"``).
"""
from __future__ import annotations

import json
import math
from fractions import Fraction
from typing import Any

import numpy as np

from .charts import AmbientPoint, ChartPoint, chart_point
from .polytope import DelzantPolytope, Facet, as_rational, build, format_rational


class FormatError(ValueError):
    """A file is not well formed.  The message says where."""

    def __init__(self, where: str, message: str):
        super().__init__(f"{where}: {message}")
        self.where = where


# ---------------------------------------------------------------------------
# numbers
# ---------------------------------------------------------------------------

def fmt_float(x: float) -> str:
    x = float(x)
    if math.isnan(x) or math.isinf(x):
        # not representable in strict JSON; emit as strings
        return json.dumps(repr(x))
    s = format(x, ".17g")
    if s == "-0":
        s = "0"
    return s


def dumps(obj: Any) -> str:
    """Compact JSON with 17-digit floats and Fractions as ``"p/q"`` strings."""
    if obj is None or isinstance(obj, bool):
        return json.dumps(obj)
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, Fraction):
        return json.dumps(format_rational(obj))
    if isinstance(obj, (float, np.floating)):
        return fmt_float(obj)
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, dict):
        return "{" + ", ".join(f"{json.dumps(str(k))}: {dumps(v)}" for k, v in obj.items()) + "}"
    if isinstance(obj, (list, tuple, np.ndarray)):
        return "[" + ", ".join(dumps(v) for v in obj) + "]"
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def complex_pair(z: complex) -> list[float]:
    return [float(z.real), float(z.imag)]


# ---------------------------------------------------------------------------
# polytope files
# ---------------------------------------------------------------------------

def _load_json(text: str, source: str):
    try:
        return json.loads(text)
    except json.JSONDecodeError as e:
        raise FormatError(f"{source}:{e.lineno}:{e.colno}", e.msg) from None


def _is_int(x) -> bool:
    return isinstance(x, int) and not isinstance(x, bool)


def parse_facets(doc, source: str = "<polytope>") -> tuple[int, list[Facet]]:
    """Check the polytope document's shape and return ``(dim, facets)``; no Delzant checks."""
    if not isinstance(doc, dict):
        raise FormatError(source, "top level must be an object")
    extra = set(doc) - {"dim", "facets"}
    if extra:
        raise FormatError(source, f"unknown keys {sorted(extra)}")
    dim = doc.get("dim")
    if not _is_int(dim) or dim < 1:
        raise FormatError(f"{source}: dim", "must be a positive integer")
    raw = doc.get("facets")
    if not isinstance(raw, list) or not raw:
        raise FormatError(f"{source}: facets", "must be a nonempty array")
    facets, seen = [], set()
    for i, item in enumerate(raw):
        where = f"{source}: facets[{i}]"
        if not isinstance(item, dict) or set(item) != {"id", "X", "lambda"}:
            raise FormatError(where, 'must be an object with keys "id", "X", "lambda"')
        fid, X, lam = item["id"], item["X"], item["lambda"]
        if not isinstance(fid, str) or not fid:
            raise FormatError(f"{where}.id", "must be a nonempty string")
        if fid in seen:
            raise FormatError(f"{where}.id", f"duplicate facet id {fid!r}")
        seen.add(fid)
        if not isinstance(X, list) or len(X) != dim or not all(_is_int(x) for x in X):
            raise FormatError(f"{where}.X", f"must be an array of {dim} integers")
        if not (_is_int(lam) or isinstance(lam, str)):
            raise FormatError(f"{where}.lambda", 'must be an integer or a "p/q" string')
        try:
            q = as_rational(lam)
        except (ValueError, ZeroDivisionError):
            raise FormatError(f"{where}.lambda", f"cannot parse {lam!r} as a rational") from None
        facets.append(Facet(fid, tuple(X), q))
    return dim, facets


def read_polytope_text(text: str, source: str = "<polytope>") -> DelzantPolytope:
    """Parse and validate.  Raises FormatError or InvalidPolytopeError."""
    dim, facets = parse_facets(_load_json(text, source), source)
    return build(dim, facets)


def read_polytope(path: str) -> DelzantPolytope:
    with open(path, encoding="utf-8") as fh:
        return read_polytope_text(fh.read(), path)


def polytope_to_text(P: DelzantPolytope) -> str:
    """Canonical form: facets sorted by id, one per line, rationals as strings."""
    lines = [f'{{"dim": {P.dim}, "facets": [']
    items = []
    for f in sorted(P.facets, key=lambda f: f.id):
        X = ", ".join(str(x) for x in f.normal)
        items.append(f'  {{"id": {json.dumps(f.id)}, "X": [{X}], "lambda": "{format_rational(f.offset)}"}}')
    lines.append(",\n".join(items))
    lines.append("]}")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# chart points
# ---------------------------------------------------------------------------

def _coord(value, where: str) -> complex:
    if (not isinstance(value, list) or len(value) != 2
            or not all(isinstance(x, (int, float)) and not isinstance(x, bool) for x in value)):
        raise FormatError(where, "must be a [re, im] pair of numbers")
    return complex(value[0], value[1])


def parse_point(doc, P: DelzantPolytope, vertex: str | None = None,
                source: str = "<point>") -> ChartPoint:
    if not isinstance(doc, dict) or "coords" not in doc:
        raise FormatError(source, 'must be an object with "coords"')
    v = doc.get("vertex")
    if v is not None and not isinstance(v, str):
        raise FormatError(f"{source}: vertex", "must be a string")
    if vertex is not None and v is not None and v != vertex:
        raise FormatError(f"{source}: vertex", f"file says {v!r} but {vertex!r} was requested")
    v = v if v is not None else vertex
    if v is None:
        raise FormatError(source, "no vertex given")
    if v not in P.vertex_ids:
        raise FormatError(f"{source}: vertex", f"unknown vertex {v!r}; have {list(P.vertex_ids)}")
    coords = doc["coords"]
    if not isinstance(coords, dict):
        raise FormatError(f"{source}: coords", "must be an object")
    want = P.vertex(v).facets
    if set(coords) != set(want):
        raise FormatError(f"{source}: coords", f"chart {v} needs keys {list(want)}, got {sorted(coords)}")
    values = {f: _coord(coords[f], f"{source}: coords.{f}") for f in want}
    return chart_point(P, v, values)


def read_point(path: str, P: DelzantPolytope, vertex: str | None = None) -> ChartPoint:
    with open(path, encoding="utf-8") as fh:
        return parse_point(_load_json(fh.read(), path), P, vertex, path)


def point_doc(z: ChartPoint | AmbientPoint) -> dict:
    doc = {"coords": {f: complex_pair(x) for f, x in z.as_dict().items()}}
    if isinstance(z, ChartPoint):
        doc = {"vertex": z.vertex, **doc}
    return doc

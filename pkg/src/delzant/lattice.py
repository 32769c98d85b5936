"""Exact integer and rational linear algebra.

Everything here works on Python ints and :class:`fractions.Fraction`, so
results are exact regardless of entry size.  Vectors are tuples, matrices
are tuples of row tuples.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd
from typing import Sequence

IntVector = tuple[int, ...]
IntRows = tuple[IntVector, ...]


class LatticeError(ValueError):
    """Raised when an integer matrix lacks a required structural property."""


class NotUnimodularError(LatticeError):
    def __init__(self, determinant: int):
        super().__init__(f"basis is not unimodular (det = {determinant})")
        self.determinant = determinant


@dataclass(frozen=True)
class IntegerMatrix:
    """Integer matrix with optional row/column labels (facet ids)."""

    rows: IntRows
    row_keys: tuple[str, ...] = ()
    col_keys: tuple[str, ...] = ()

    def __post_init__(self):
        width = {len(r) for r in self.rows}
        if len(width) > 1:
            raise ValueError("ragged matrix")
        if self.row_keys and len(self.row_keys) != len(self.rows):
            raise ValueError("row label count does not match row count")
        if self.col_keys and self.rows and len(self.col_keys) != len(self.rows[0]):
            raise ValueError("column label count does not match column count")

    @property
    def shape(self) -> tuple[int, int]:
        if not self.rows:
            return (0, len(self.col_keys))
        return (len(self.rows), len(self.rows[0]))

    def __getitem__(self, ij):
        i, j = ij
        if isinstance(i, str):
            i = self.row_keys.index(i)
        if isinstance(j, str):
            j = self.col_keys.index(j)
        return self.rows[i][j]

    def columns(self) -> IntRows:
        return transpose(self.rows)


# ---------------------------------------------------------------------------
# small helpers
# ---------------------------------------------------------------------------

def content(v: Sequence[int]) -> int:
    """gcd of the entries; 0 for the zero vector."""
    g = 0
    for x in v:
        g = gcd(g, int(x))
    return g


def is_primitive(v: Sequence[int]) -> bool:
    return content(v) == 1


def transpose(rows: Sequence[Sequence]) -> tuple:
    return tuple(zip(*rows)) if rows else ()


def matmul(a: Sequence[Sequence], b: Sequence[Sequence]) -> tuple:
    bt = transpose(b)
    return tuple(tuple(sum(x * y for x, y in zip(row, col)) for col in bt) for row in a)


def matvec(a: Sequence[Sequence], x: Sequence) -> tuple:
    return tuple(sum(aij * xj for aij, xj in zip(row, x)) for row in a)


def identity(n: int) -> IntRows:
    return tuple(tuple(int(i == j) for j in range(n)) for i in range(n))


def det(a: Sequence[Sequence[int]]) -> int:
    """Determinant of a square integer matrix by fraction-free Bareiss elimination."""
    m = [list(map(int, row)) for row in a]
    n = len(m)
    if any(len(row) != n for row in m):
        raise ValueError("det of a non-square matrix")
    if n == 0:
        return 1
    sign, prev = 1, 1
    for k in range(n - 1):
        if m[k][k] == 0:
            for i in range(k + 1, n):
                if m[i][k] != 0:
                    m[k], m[i] = m[i], m[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) // prev
        prev = m[k][k]
    return sign * m[n - 1][n - 1]


def solve_rational(a: Sequence[Sequence], b: Sequence) -> tuple[Fraction, ...]:
    """Solve the square system a x = b exactly; raises LatticeError if singular."""
    n = len(a)
    m = [[Fraction(x) for x in row] + [Fraction(bi)] for row, bi in zip(a, b)]
    for col in range(n):
        piv = next((r for r in range(col, n) if m[r][col] != 0), None)
        if piv is None:
            raise LatticeError("singular system")
        m[col], m[piv] = m[piv], m[col]
        p = m[col][col]
        m[col] = [x / p for x in m[col]]
        for r in range(n):
            if r != col and m[r][col] != 0:
                f = m[r][col]
                m[r] = [x - f * y for x, y in zip(m[r], m[col])]
    return tuple(row[n] for row in m)


def integer_inverse(a: Sequence[Sequence[int]]) -> IntRows:
    """Exact inverse of a unimodular integer matrix."""
    d = det(a)
    if abs(d) != 1:
        raise NotUnimodularError(d)
    n = len(a)
    cols = [solve_rational(a, e) for e in identity(n)]
    return tuple(tuple(int(cols[j][i]) for j in range(n)) for i in range(n))


# ---------------------------------------------------------------------------
# Hermite normal form and kernels
# ---------------------------------------------------------------------------

def column_hermite(a: Sequence[Sequence[int]]) -> tuple[list[list[int]], list[list[int]], list[int]]:
    """Column-style Hermite reduction ``a @ u = h``.

    Returns ``(h, u, pivots)`` where ``u`` is unimodular, ``h`` is in lower
    echelon form (row ``i`` has its pivot in column ``pivots[i]`` or no pivot),
    pivots are positive and entries left of a pivot are reduced modulo it.
    The columns of ``u`` past ``len(pivots)`` span the integer kernel of ``a``.
    """
    h = [list(map(int, row)) for row in a]
    nrows = len(h)
    ncols = len(h[0]) if h else 0
    u = [list(row) for row in identity(ncols)]

    def colop(j, k, q):  # col_j -= q * col_k
        for row in h:
            row[j] -= q * row[k]
        for row in u:
            row[j] -= q * row[k]

    def swap(j, k):
        for row in h:
            row[j], row[k] = row[k], row[j]
        for row in u:
            row[j], row[k] = row[k], row[j]

    def negate(j):
        for row in h:
            row[j] = -row[j]
        for row in u:
            row[j] = -row[j]

    pivots: list[int] = []
    c = 0
    for i in range(nrows):
        if c >= ncols:
            break
        while True:
            nz = [j for j in range(c, ncols) if h[i][j] != 0]
            if not nz:
                break
            k = min(nz, key=lambda j: abs(h[i][j]))
            if k != c:
                swap(k, c)
            done = True
            for j in range(c + 1, ncols):
                if h[i][j]:
                    colop(j, c, h[i][j] // h[i][c])
                    if h[i][j]:
                        done = False
            if done:
                break
        if h[i][c] == 0:
            continue
        if h[i][c] < 0:
            negate(c)
        for j in range(c):
            colop(j, c, h[i][j] // h[i][c])
        pivots.append(c)
        c += 1
    return h, u, pivots


def kernel_lattice_basis(m: IntegerMatrix | Sequence[Sequence[int]]) -> IntegerMatrix:
    """Integer basis of ``{t in Z^d : m t = 0}`` for a surjective ``m : Z^d -> Z^n``.

    ``m`` must have full row rank and its columns must generate ``Z^n``; the
    facet normals of a Delzant polytope always do.  Rows of the result are
    the basis vectors, columns are labelled like the columns of ``m``.
    """
    if isinstance(m, IntegerMatrix):
        rows, col_keys = m.rows, m.col_keys
    else:
        rows, col_keys = tuple(tuple(map(int, r)) for r in m), ()
    n = len(rows)
    d = len(rows[0]) if rows else 0
    h, u, pivots = column_hermite(rows)
    if len(pivots) < n:
        raise LatticeError(f"matrix has rank {len(pivots)} < {n}")
    # columns generate Z^n iff the square echelon block has unit diagonal
    diag = [h[i][pivots[i]] for i in range(n)]
    if any(x != 1 for x in diag):
        prod = 1
        for x in diag:
            prod *= x
        raise LatticeError(f"columns generate a sublattice of index {prod}")
    basis = tuple(tuple(u[i][j] for i in range(d)) for j in range(n, d))
    basis = tuple(_normalize_sign(b) for b in basis)
    row_keys = tuple(f"k{j}" for j in range(len(basis)))
    return IntegerMatrix(basis, row_keys, tuple(col_keys) or ())


def _normalize_sign(v: IntVector) -> IntVector:
    first = next((x for x in v if x), 0)
    return tuple(-x for x in v) if first < 0 else v


def base_change_coeffs(basis: Sequence[Sequence[int]], target: Sequence[int]) -> IntVector:
    """Integer coefficients ``c`` with ``sum_g c[g] * basis[g] == target``.

    ``basis`` is a list of ``n`` integer vectors of length ``n`` with
    ``|det| = 1``.
    """
    d = det(basis)
    if abs(d) != 1:
        raise NotUnimodularError(d)
    cols = transpose(basis)
    sol = solve_rational(cols, target)
    return tuple(int(x) for x in sol)

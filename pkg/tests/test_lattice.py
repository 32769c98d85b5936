from fractions import Fraction
from itertools import combinations, product

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from delzant import lattice
from delzant.lattice import (IntegerMatrix, LatticeError, NotUnimodularError, base_change_coeffs,
                             column_hermite, content, det, integer_inverse, is_primitive,
                             kernel_lattice_basis, matmul, solve_rational)


def _cofactor_det(a):
    # independent oracle: Laplace expansion
    n = len(a)
    if n == 0:
        return 1
    if n == 1:
        return a[0][0]
    return sum((-1) ** j * a[0][j] * _cofactor_det([row[:j] + row[j + 1:] for row in a[1:]])
               for j in range(n))


def _kernel_by_enumeration(m, bound):
    d = len(m[0])
    return [t for t in product(range(-bound, bound + 1), repeat=d)
            if all(sum(a * x for a, x in zip(row, t)) == 0 for row in m)]


def _maximal_minor_gcd(rows):
    k, d = len(rows), len(rows[0])
    g = 0
    for cols in combinations(range(d), k):
        g = np.gcd(g, abs(det([[r[c] for c in cols] for r in rows])))
    return int(g)


# ==========================================================================
# primitivity
# ==========================================================================

class TestPrimitive:

    def test_examples(self):
        assert is_primitive((1, 0))
        assert not is_primitive((2, 4))
        assert is_primitive((-1, 1))

    def test_zero_vector(self):
        assert content((0, 0)) == 0
        assert not is_primitive((0, 0))

    @given(st.lists(st.integers(-50, 50), min_size=1, max_size=5))
    def test_content_divides(self, v):
        g = content(v)
        if g:
            assert all(x % g == 0 for x in v)
            assert is_primitive([x // g for x in v])


# ==========================================================================
# determinants and exact solves
# ==========================================================================

class TestExactAlgebra:

    @given(st.integers(1, 4).flatmap(
        lambda n: st.lists(st.lists(st.integers(-9, 9), min_size=n, max_size=n), min_size=n, max_size=n)))
    def test_det_matches_cofactor_expansion(self, a):
        assert det(a) == _cofactor_det(a)

    def test_det_non_square(self):
        with pytest.raises(ValueError):
            det([[1, 2]])

    def test_solve_rational_exact(self):
        x = solve_rational([[2, 1], [1, 3]], [1, 2])
        assert x == (Fraction(1, 5), Fraction(3, 5))

    def test_solve_singular(self):
        with pytest.raises(LatticeError):
            solve_rational([[1, 2], [2, 4]], [1, 1])

    def test_integer_inverse(self):
        a = [[2, 1], [1, 1]]
        inv = integer_inverse(a)
        assert matmul(a, inv) == lattice.identity(2)

    def test_integer_inverse_rejects(self):
        with pytest.raises(NotUnimodularError) as info:
            integer_inverse([[2, 0], [0, 1]])
        assert info.value.determinant == 2


# ==========================================================================
# Hermite form and kernels
# ==========================================================================

class TestKernel:

    def test_cp1(self):
        assert kernel_lattice_basis([[-1, 1]]).rows == ((1, 1),)

    def test_injective(self):
        assert kernel_lattice_basis([[1, 0], [0, 1]]).rows == ()

    def test_cp2(self):
        assert kernel_lattice_basis([[-1, 1, 0], [-1, 0, 1]]).rows == ((1, 1, 1),)

    def test_labels_follow_columns(self):
        m = IntegerMatrix(((-1, 1),), col_keys=("f0", "f1"))
        k = kernel_lattice_basis(m)
        assert k.col_keys == ("f0", "f1") and k.row_keys == ("k0",)
        assert k["k0", "f1"] == 1

    def test_rank_deficient(self):
        with pytest.raises(LatticeError):
            kernel_lattice_basis([[1, 2], [2, 4]])

    def test_not_surjective(self):
        with pytest.raises(LatticeError):
            kernel_lattice_basis([[2, 4]])

    def test_hirzebruch_normals(self):
        for m in range(4):
            cols = [(1, 0), (0, 1), (-1, m), (0, -1)]
            M = [[c[i] for c in cols] for i in range(2)]
            k = kernel_lattice_basis(M).rows
            assert len(k) == 2
            assert _maximal_minor_gcd(k) == 1
            for t in _kernel_by_enumeration(M, 3):
                # every small kernel vector is an integer combination of the basis
                sol = np.linalg.lstsq(np.array(k, dtype=float).T, np.array(t, dtype=float), rcond=None)[0]
                assert np.allclose(sol, np.round(sol), atol=1e-9)

    @settings(max_examples=60, deadline=None)
    @given(st.integers(1, 3).flatmap(lambda n: st.tuples(
        st.just(n), st.lists(st.lists(st.integers(-4, 4), min_size=n, max_size=n), min_size=n + 1, max_size=n + 3))))
    def test_random_surjective(self, case):
        n, cols = case
        M = [[c[i] for c in cols] for i in range(n)]
        try:
            k = kernel_lattice_basis(M).rows
        except LatticeError:
            # only legitimate when the columns fail to span Z^n
            h, _, piv = column_hermite(M)
            assert len(piv) < n or any(h[i][piv[i]] != 1 for i in range(n))
            return
        d = len(cols)
        assert len(k) == d - n
        for row in k:
            assert all(sum(a * x for a, x in zip(r, row)) == 0 for r in M)
            assert next(x for x in row if x) > 0
        if k:
            # saturated: the basis spans the whole kernel lattice, not a sublattice
            assert _maximal_minor_gcd(k) == 1

    def test_hermite_invariants(self):
        a = [[3, 5, 7], [2, -1, 4]]
        h, u, piv = column_hermite(a)
        assert [list(r) for r in matmul(a, u)] == h
        assert abs(det(u)) == 1
        assert all(h[i][piv[i]] > 0 for i in range(len(piv)))


# ==========================================================================
# base change
# ==========================================================================

class TestBaseChange:

    def test_one_dimensional(self):
        assert base_change_coeffs([(-1,)], (1,)) == (-1,)

    def test_basis_element(self):
        assert base_change_coeffs([(1, 0), (1, 1)], (1, 1)) == (0, 1)

    def test_cp2_e0(self):
        assert base_change_coeffs([(1, 0), (0, 1)], (-1, -1)) == (-1, -1)

    def test_rejects_non_unimodular(self):
        with pytest.raises(NotUnimodularError):
            base_change_coeffs([(1, 0), (0, 2)], (1, 1))

    @given(st.lists(st.integers(-20, 20), min_size=2, max_size=2),
           st.integers(-3, 3), st.integers(-3, 3))
    def test_reconstructs_target(self, target, a, b):
        basis = [(1, a), (b, a * b + 1)]  # det 1 by construction
        c = base_change_coeffs(basis, target)
        assert tuple(sum(ci * bi[k] for ci, bi in zip(c, basis)) for k in range(2)) == tuple(target)

from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from delzant import charts
from delzant.charts import (ChartPoint, PointOutsideDelta, act, ambient_point, chart_point, in_U_v,
                            in_Z, mu_v, point_over, r_f, section_s_v, stratum_of)
from delzant.polytope import simplex, unit_cube
from support import EXAMPLES

CP1 = simplex(1, ["1/2", "1/2"])
CP2 = simplex(2, [1, 0, 0])
ORIGIN = CP2.vertex_at([0, 0]).id  # F_v = {f1, f2}

angles = st.floats(-2, 2, allow_nan=False)


# ==========================================================================
# points
# ==========================================================================

class TestChartPoint:

    def test_from_mapping_and_sequence(self):
        a = chart_point(CP2, ORIGIN, {"f2": 2, "f1": 1j})
        b = chart_point(CP2, ORIGIN, [1j, 2])
        assert np.array_equal(a.z, b.z)
        assert a["f1"] == 1j

    def test_readonly(self):
        z = chart_point(CP2, ORIGIN, [1, 2])
        with pytest.raises(ValueError):
            z.z[0] = 5

    def test_key_mismatch(self):
        with pytest.raises(ValueError):
            chart_point(CP2, ORIGIN, {"f0": 1, "f1": 1})
        with pytest.raises(ValueError):
            chart_point(CP2, ORIGIN, [1, 2, 3])
        bogus = ChartPoint(ORIGIN, ("f2", "f1"), np.zeros(2))
        with pytest.raises(ValueError):
            mu_v(CP2, bogus)


# ==========================================================================
# momentum
# ==========================================================================

class TestMomentum:

    def test_zero_is_vertex(self):
        for P in EXAMPLES.values():
            for v in P.vertices:
                xi = mu_v(P, chart_point(P, v.id, np.zeros(P.dim)))
                assert np.array_equal(xi, [float(x) for x in v.position])

    def test_cp1(self):
        assert mu_v(CP1, chart_point(CP1, "v1", [1])) == pytest.approx([0.0], abs=0)

    def test_cp2(self):
        assert np.allclose(mu_v(CP2, chart_point(CP2, ORIGIN, [0.5, 0.5])), [1 / 8, 1 / 8], atol=1e-16)

    def test_r_f(self):
        assert r_f(CP1, "f0", [-0.5]) == pytest.approx(np.sqrt(2))
        assert r_f(CP1, "f1", [-0.5]) == 0.0
        with pytest.raises(PointOutsideDelta):
            r_f(CP1, "f1", [-1.5])

    @settings(deadline=None)
    @given(st.lists(angles, min_size=2, max_size=2), st.lists(st.floats(0, 0.7), min_size=2, max_size=2))
    def test_action_preserves_momentum(self, a, mod):
        z = chart_point(CP2, ORIGIN, np.array(mod) * np.exp(1j * np.array([0.3, -1.1])))
        assert np.max(np.abs(mu_v(CP2, act(a, z)) - mu_v(CP2, z))) <= 1e-12


# ==========================================================================
# U_v
# ==========================================================================

class TestDomain:

    def test_zero_inside(self):
        assert in_U_v(CP1, chart_point(CP1, "v1", [0]))

    def test_boundary_circle(self):
        # gamma = 1: U_v is the open disc of radius sqrt(2)
        assert not in_U_v(CP1, chart_point(CP1, "v1", [np.sqrt(2)]))
        assert in_U_v(CP1, chart_point(CP1, "v1", [1]))
        assert charts.in_closure_U_v(CP1, chart_point(CP1, "v1", [np.sqrt(2)]))


# ==========================================================================
# level set and section
# ==========================================================================

class TestSection:

    def test_cp1(self):
        s = section_s_v(CP1, chart_point(CP1, "v1", [1]))
        assert s["f1"] == 1 and s["f0"] == pytest.approx(1)
        s = section_s_v(CP1, chart_point(CP1, "v1", [0]))
        assert s["f1"] == 0 and s["f0"] == pytest.approx(np.sqrt(2))

    def test_cp2(self):
        s = section_s_v(CP2, chart_point(CP2, ORIGIN, [0.5, 0.5]))
        assert s["f0"] == pytest.approx(np.sqrt(1.5))

    def test_outside(self):
        with pytest.raises(PointOutsideDelta):
            section_s_v(CP1, chart_point(CP1, "v1", [2]))

    def test_in_Z(self):
        xi = in_Z(CP1, ambient_point(CP1, {"f0": np.sqrt(2), "f1": 0}))
        assert xi == pytest.approx([-0.5])
        assert in_Z(CP1, ambient_point(CP1, [0, 0])) is None

    @pytest.mark.parametrize("name", sorted(EXAMPLES))
    def test_section_lands_in_Z(self, name):
        P = EXAMPLES[name]
        rng = np.random.default_rng(5)
        for v in P.vertex_ids:
            for _ in range(20):
                xi = P.barycenter() + 0.3 * (rng.uniform(size=P.dim) - 0.5) * P.inradius()
                z = point_over(P, v, xi, rng.uniform(size=P.dim))
                s = section_s_v(P, z)
                own = [P.facet_ids.index(f) for f in z.facets]
                assert np.array_equal(s.z[own], z.z)
                assert np.allclose(in_Z(P, s), xi, atol=1e-10)


# ==========================================================================
# strata and action
# ==========================================================================

class TestStrata:

    def test_examples(self):
        assert stratum_of(CP2, chart_point(CP2, ORIGIN, [0, 0])) == {"f1", "f2"}
        assert stratum_of(CP2, chart_point(CP2, ORIGIN, [0.1, 0.2j])) == frozenset()
        assert stratum_of(CP2, chart_point(CP2, ORIGIN, [0, 0.5])) == {"f1"}

    def test_matches_face(self):
        P = unit_cube(3)
        v = P.vertex_at([0, 0, 0]).id
        z = chart_point(P, v, [0, 0.5, 0])
        assert stratum_of(P, z) == P.face_containing(mu_v(P, z), tol=charts.TOL)


class TestAction:

    def test_identity_and_half_turn(self):
        z = chart_point(CP1, "v1", [1])
        assert act([0], z).z[0] == 1
        assert act({"f1": 0.5}, z).z[0] == pytest.approx(-1)

    @given(st.lists(angles, min_size=2, max_size=2))
    def test_modulus(self, a):
        z = chart_point(CP2, ORIGIN, [0.3 + 0.1j, -0.2j])
        assert np.allclose(np.abs(act(a, z).z), np.abs(z.z), rtol=1e-15)

    def test_bad_angles(self):
        z = chart_point(CP2, ORIGIN, [0.3, 0.2])
        with pytest.raises(ValueError):
            act([1, 2, 3], z)

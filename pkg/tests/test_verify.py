import json

import numpy as np
import pytest

from delzant import verify
from delzant.charts import mu_v
from delzant.polytope import simplex, unit_cube
from delzant.verify import (REQUIRED_CHECKS, SampleConfig, SamplingError, check_cocycle, check_strata,
                            check_vertex_momentum, generator, run_suite, sample_chart_points,
                            sample_momenta, slack_floor)
from support import EXAMPLES

CP1 = simplex(1, ["1/2", "1/2"])
CP2 = simplex(2, [1, 0, 0])
SQUARE = unit_cube(2)


# ==========================================================================
# generators and configuration
# ==========================================================================

class TestGenerators:

    def test_deterministic(self):
        a = generator(3, "cocycle", ("v0", "v1")).uniform(size=5)
        b = generator(3, "cocycle", ("v0", "v1")).uniform(size=5)
        assert np.array_equal(a, b)

    def test_keyed_by_check_and_vertices(self):
        base = generator(0, "momentum", ("v0", "v1")).uniform(size=4)
        assert not np.array_equal(base, generator(0, "momentum", ("v1", "v0")).uniform(size=4))
        assert not np.array_equal(base, generator(0, "symplectic", ("v0", "v1")).uniform(size=4))
        assert not np.array_equal(base, generator(1, "momentum", ("v0", "v1")).uniform(size=4))

    def test_config_validation(self):
        with pytest.raises(ValueError):
            SampleConfig(count=0)
        with pytest.raises(ValueError):
            SampleConfig(margin=0.0)

    def test_default_margin(self):
        assert SampleConfig().margin_for(SQUARE) == pytest.approx(0.025)
        assert SampleConfig(margin=0.1).margin_for(SQUARE) == 0.1


# ==========================================================================
# sampling
# ==========================================================================

class TestSampling:

    def test_slack_floor(self):
        v = SQUARE.vertex_at([0, 0]).id
        w = SQUARE.vertex_at([1, 0]).id
        floor = dict(zip(SQUARE.facet_ids, slack_floor(SQUARE, v, 0.1)))
        assert floor == {"lo1": 0.0, "lo2": 0.0, "hi1": pytest.approx(0.1), "hi2": pytest.approx(0.1)}
        # lo1 is dropped in the chart at w, so |z_lo1| >= margin
        floor = dict(zip(SQUARE.facet_ids, slack_floor(SQUARE, v, 0.1, (w,))))
        assert floor["lo1"] == pytest.approx(0.005) and floor["lo2"] == 0.0

    def test_floor_scales_with_normal_length(self):
        v = CP2.vertex_at([0, 0]).id
        floor = dict(zip(CP2.facet_ids, slack_floor(CP2, v, 0.1)))
        assert floor["f0"] == pytest.approx(0.1 * np.sqrt(2))

    def test_momenta_respect_margin(self):
        v = CP2.vertex_at([0, 0]).id
        xi = sample_momenta(CP2, v, 300, 0.05, generator(0, "t", (v,)))
        assert xi.shape == (300, 2)
        assert np.all(xi >= 0)
        # distance to the far facet x + y = 1
        assert np.all((1 - xi.sum(axis=1)) / np.sqrt(2) >= 0.05)

    def test_chart_points_lie_over_momenta(self):
        v = SQUARE.vertex_at([1, 1]).id
        pts = sample_chart_points(SQUARE, v, 50, 0.02, generator(1, "t", (v,)))
        assert all(p.vertex == v for p in pts)
        xi = np.array([mu_v(SQUARE, p) for p in pts])
        assert np.all(xi >= 0.02 - 1e-12) and np.all(xi <= 1)

    def test_same_seed_same_points(self):
        a = sample_chart_points(CP2, "v0", 10, 0.05, generator(0, "x", ("v0",)))
        b = sample_chart_points(CP2, "v0", 10, 0.05, generator(0, "x", ("v0",)))
        assert all(np.array_equal(p.z, q.z) for p, q in zip(a, b))

    def test_margin_too_large(self):
        with pytest.raises(SamplingError):
            sample_momenta(SQUARE, "v0", 5, 2.0, generator(0, "t", ("v0",)))


# ==========================================================================
# individual checks and reports
# ==========================================================================

class TestChecks:

    def test_trivial_cocycle_is_exact(self):
        cfg = SampleConfig(20, seed=5)
        for v in CP2.vertex_ids:
            rep = check_cocycle(CP2, v, v, v, cfg)
            assert rep.max_error == 0.0 and rep.passed

    def test_vertex_momentum(self):
        for v in CP2.vertex_ids:
            rep = check_vertex_momentum(CP2, v)
            assert rep.passed and rep.max_error <= 1e-14

    def test_tolerance_override_can_fail(self):
        cfg = SampleConfig(20, seed=0)
        v, w = CP2.vertex_ids[:2]
        rep = verify.check_symplectic(CP2, v, w, cfg, tol=1e-300)
        assert not rep.passed and rep.tolerance == 1e-300
        assert rep.worst_input["vertex"] == v

    def test_strata_exact(self):
        rep = check_strata(EXAMPLES["H2"], "v0", SampleConfig(50, seed=2))
        assert rep.passed and rep.max_error == 0

    def test_report_json(self):
        rep = check_cocycle(CP2, "v0", "v1", "v2", SampleConfig(5))
        doc = json.loads(rep.to_json())
        assert set(doc) == {"check", "vertices", "samples", "max_error", "tolerance", "pass", "worst_input"}
        assert doc["vertices"] == ["v0", "v1", "v2"] and doc["samples"] == 5
        assert set(doc["worst_input"]["coords"]) == set(CP2.vertex("v0").facets)


# ==========================================================================
# whole suite
# ==========================================================================

class TestSuite:

    @pytest.mark.parametrize("P", [CP1, CP2], ids=["CP1", "CP2"])
    def test_passes(self, P):
        result = run_suite(P, SampleConfig(20, seed=0))
        assert result.passed, [r for r in result.reports if not r.passed]
        assert not result.missing
        assert {r.check for r in result.reports} == REQUIRED_CHECKS

    def test_report_counts(self):
        result = run_suite(CP1, SampleConfig(10, seed=1))
        k = len(CP1.vertices)
        assert len(result.by_check("cocycle")) == k ** 3
        assert len(result.by_check("symplectic")) == k ** 2
        assert len(result.by_check("vertex_momentum")) == k

    def test_reproducible(self):
        a = run_suite(CP1, SampleConfig(10, seed=7))
        b = run_suite(CP1, SampleConfig(10, seed=7))
        assert [r.to_json() for r in a.reports] == [r.to_json() for r in b.reports]

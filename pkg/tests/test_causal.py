import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lorentzdist import (CauchySurface, CausalRelation, ConformallyFlat,
                         FlatCylinder, Minkowski, SurfaceSide, classify_pair,
                         closed_form_distance, cone_trace_diameter,
                         conformal_factor, surface_relation)
from lorentzdist.errors import ToolkitError

from conftest import chrono_step, random_point


class TestClassifyPair:
    def test_pure_time_is_chronological(self, mink2):
        rel = classify_pair(mink2, mink2.point(0, 0), mink2.point(2, 0))
        assert rel is CausalRelation.CHRONOLOGICAL_FUTURE

    def test_wide_pair_unrelated(self, mink2):
        rel = classify_pair(mink2, mink2.point(0, 0), mink2.point(1, 2))
        assert rel is CausalRelation.UNRELATED

    def test_cylinder_winding(self, cyl):
        # minimal winding displacement pi < 4, so the pair is chronological
        rel = classify_pair(cyl, cyl.point(0, 0), cyl.point(4, math.pi))
        assert rel is CausalRelation.CHRONOLOGICAL_FUTURE

    def test_null_boundary(self, mink2):
        rel = classify_pair(mink2, mink2.point(0, 0), mink2.point(1, 1))
        assert rel is CausalRelation.NULL_BOUNDARY_FUTURE
        rel = classify_pair(mink2, mink2.point(1, 1), mink2.point(0, 0))
        assert rel is CausalRelation.NULL_BOUNDARY_PAST

    def test_equal_points(self, cyl):
        p = cyl.point(1.0, 2.0)
        assert classify_pair(cyl, p, cyl.point(1.0, 2.0 + cyl.circumference)) \
            is CausalRelation.EQUAL

    def test_conformal_factor_preserves_cones(self, rng):
        flat = Minkowski(2)
        curved = ConformallyFlat(conformal_factor("time_quadratic"))
        for _ in range(200):
            p = random_point(flat, rng)
            q = random_point(flat, rng)
            assert (classify_pair(flat, p, q).value
                    == classify_pair(curved, curved.point(*p.coords),
                                     curved.point(*q.coords)).value)

    def test_antisymmetry(self, spacetime, rng):
        mirror = {"equal": "equal", "unrelated": "unrelated",
                  "chronological_future": "chronological_past",
                  "chronological_past": "chronological_future",
                  "null_boundary_future": "null_boundary_past",
                  "null_boundary_past": "null_boundary_future"}
        for _ in range(200):
            p, q = random_point(spacetime, rng), random_point(spacetime, rng)
            assert (classify_pair(spacetime, q, p).value
                    == mirror[classify_pair(spacetime, p, q).value])

    def test_transitivity(self, spacetime, rng):
        for _ in range(200):
            p = random_point(spacetime, rng)
            q = chrono_step(spacetime, rng, p)
            r = chrono_step(spacetime, rng, q)
            assert classify_pair(spacetime, p, r).is_future

    def test_chronological_iff_positive_distance(self, closed_form_spacetime, rng):
        s = closed_form_spacetime
        for _ in range(300):
            p, q = random_point(s, rng), random_point(s, rng)
            chrono = classify_pair(s, p, q) is CausalRelation.CHRONOLOGICAL_FUTURE
            assert chrono == (closed_form_distance(s, p, q) > 0)

    @given(dt=st.floats(-4, 4), dx=st.floats(-4, 4))
    @settings(max_examples=300, deadline=None)
    def test_matches_cone_inequality(self, dt, dx):
        s = Minkowski(2)
        rel = classify_pair(s, s.point(0, 0), s.point(dt, dx))
        if abs(abs(dt) - abs(dx)) > 1e-9:
            if dt > abs(dx):
                assert rel is CausalRelation.CHRONOLOGICAL_FUTURE
            elif -dt > abs(dx):
                assert rel is CausalRelation.CHRONOLOGICAL_PAST
            elif (dt, dx) != (0.0, 0.0):
                assert rel is CausalRelation.UNRELATED


class TestSurfaceRelation:
    @pytest.mark.parametrize("t,expected", [
        (2.0, SurfaceSide.FUTURE_OF_SURFACE),
        (1.0, SurfaceSide.ON_SURFACE),
        (0.999, SurfaceSide.PAST_OF_SURFACE),
    ])
    def test_sign_of_level_gap(self, mink2, t, expected):
        assert surface_relation(mink2, mink2.point(t, 5.0), CauchySurface(1.0)) is expected


class TestConeTraceDiameter:
    def test_flat_depth(self, mink2):
        d = cone_trace_diameter(mink2, mink2.point(0, 0), CauchySurface(0.3))
        assert d == pytest.approx(0.6)

    def test_cylinder_wraps_to_full_circle(self, cyl):
        d = cone_trace_diameter(cyl, cyl.point(0, 0), CauchySurface(10.0))
        assert d == pytest.approx(2 * math.pi)

    def test_generator_eligibility_threshold(self, mink2):
        d = cone_trace_diameter(mink2, mink2.point(-0.49, 0), CauchySurface(0.0))
        assert d == pytest.approx(0.98)
        assert d < 1.0

    def test_requires_strictly_past_point(self, mink2):
        with pytest.raises(ToolkitError):
            cone_trace_diameter(mink2, mink2.point(1.0, 0), CauchySurface(1.0))

    def test_conformal_quadrature_matches_antiderivative(self):
        # oracle: integral of 1 + a*cos(x) over the trace interval
        s = ConformallyFlat(conformal_factor("space_cosine", amplitude=0.1))
        x0, r, tau = 0.4, 0.3, 0.0
        p = s.point(tau - r, x0)
        exact = 2 * r + 0.1 * (math.sin(x0 + r) - math.sin(x0 - r))
        assert exact == pytest.approx(0.6544384270590863)
        got = cone_trace_diameter(s, p, CauchySurface(tau))
        assert got == pytest.approx(exact, abs=1e-12)

    def test_conformal_time_factor_is_constant_on_surface(self):
        s = ConformallyFlat(conformal_factor("time_quadratic"))
        tau, depth = 1.0, 0.2
        got = cone_trace_diameter(s, s.point(tau - depth, 0.7), CauchySurface(tau))
        assert got == pytest.approx((1 + tau ** 2 / 10.0) * 2 * depth, abs=1e-12)

    def test_shrinks_with_depth(self, spacetime, rng):
        x = random_point(spacetime, rng)
        for h in (0.3, 0.1, 0.01, 1e-4):
            d = cone_trace_diameter(spacetime, x, CauchySurface(x.t + h))
            assert 0 < d <= 2 * h * 3.0  # conformal factor bounded on the box

import json
import math

import numpy as np
import pytest

from lorentzdist import (CauchySurface, FlatCylinder, GridSpec, Minkowski,
                         build_covering_witness, build_equality_witness,
                         build_reverse_witness, build_unrelated_witness,
                         check_admissible, classify_pair, closed_form_distance,
                         lower_bound_slack, verify_covering_invariants)
from lorentzdist.errors import (ChartDomainError, ContractViolation,
                                CoverageImpossible, PairNotFuture, PairNotPast,
                                PairNotUnrelated, UnsupportedSpacetime)


@pytest.fixture(scope="module")
def cyl_covering():
    s = FlatCylinder()
    cw = build_covering_witness(s, CauchySurface(1.0), "above",
                                [s.point(1, 0)], [s.point(1.4, 0)], depth=0.15)
    return s, cw


class TestCoveringWitness:
    def test_certificate_and_size(self, cyl_covering):
        _, cw = cyl_covering
        assert cw.certificate.ok
        assert cw.certificate.uncovered == ()
        # base layer only: guard margin 0.4 exceeds the refinement threshold
        assert len(cw.layers) == 1
        assert 40 <= cw.n_generators <= 60

    def test_generators_avoid_excluded_past(self, cyl_covering):
        s, cw = cyl_covering
        q = cw.excluded[0]
        for g in cw.generators:
            rel = classify_pair(s, g, q)
            assert not (rel.is_future or rel.value == "equal")

    def test_generator_trace_diameter_below_r_max(self, cyl_covering):
        from lorentzdist import cone_trace_diameter
        s, cw = cyl_covering
        for g in cw.generators:
            assert cone_trace_diameter(s, g, cw.surface) < cw.r_max

    def test_field_zero_in_excluded_past(self, cyl_covering):
        s, cw = cyl_covering
        assert cw.field.value(s.point(0.5, 0.2)) == 0.0

    def test_field_positive_above_surface(self, cyl_covering):
        s, cw = cyl_covering
        assert cw.field.value(s.point(2, math.pi)) > 0.0

    def test_sampled_invariants(self, cyl_covering):
        _, cw = cyl_covering
        inv = verify_covering_invariants(cw, seed=5)
        assert inv["zero_max_abs"] == 0.0
        assert inv["positive_min"] > 0.0
        assert inv["positive_samples"] == 200
        assert inv["cross_term_max"] <= 1e-12
        assert inv["locality_ok"]

    def test_admissible_above_surface(self, cyl_covering):
        s, cw = cyl_covering
        grid = GridSpec(((1.0, 3.0), (0.0, s.circumference)), (101, 101))
        rep = check_admissible(s, cw.field, grid)
        assert rep.verdict
        assert rep.ess_sup_estimate <= -1 + 1e-6

    def test_below_side_mirror(self):
        s = FlatCylinder()
        cw = build_covering_witness(s, CauchySurface(0.0), "below",
                                    [s.point(0, 1)], [s.point(-0.4, 1)], depth=0.15)
        assert cw.certificate.ok
        # vanishes on the causal future of the excluded point
        assert cw.field.value(s.point(0.5, 1.1)) == 0.0
        assert cw.field.value(s.point(-1.0, 4.0)) > 0.0
        inv = verify_covering_invariants(cw, seed=6)
        assert inv["zero_max_abs"] == 0.0
        assert inv["positive_min"] > 0.0

    def test_minkowski_window(self):
        s = Minkowski(2)
        cw = build_covering_witness(s, CauchySurface(1.0), "above",
                                    [s.point(1, 0)], [s.point(1.4, 0)],
                                    depth=0.15, window=(-4.0, 4.0))
        assert cw.certificate.ok
        assert cw.field.value(s.point(2.0, 2.0)) > 0.0
        assert cw.field.value(s.point(0.5, 0.2)) == 0.0

    def test_minkowski_needs_window(self):
        s = Minkowski(2)
        with pytest.raises(ChartDomainError):
            build_covering_witness(s, CauchySurface(1.0), "above",
                                   [s.point(1, 0)], [s.point(1.4, 0)])

    def test_dim3_unsupported(self):
        s = Minkowski(3)
        with pytest.raises(UnsupportedSpacetime):
            build_covering_witness(s, CauchySurface(1.0), "above",
                                   [s.point(1, 0, 0)], [s.point(1.4, 0, 0)],
                                   window=(-4.0, 4.0))

    def test_tight_guard_needs_refinement(self):
        s = FlatCylinder()
        args = (s, CauchySurface(1.0), "above", [s.point(1, 0)],
                [s.point(1.02, 0)])
        with pytest.raises(CoverageImpossible):
            build_covering_witness(*args, depth=0.15, refine=False)
        cw = build_covering_witness(*args, depth=0.15, refine=True)
        assert cw.certificate.ok
        assert len(cw.layers) > 1

    def test_obstruction_when_excluded_past_fills_surface(self):
        s = FlatCylinder()
        # the excluded point is so high that J-(e) swallows every generator slot
        with pytest.raises(CoverageImpossible):
            build_covering_witness(s, CauchySurface(1.0), "above",
                                   [s.point(10, 0)], [s.point(10.5, 0)],
                                   depth=0.15)

    def test_guard_must_be_strictly_chronological(self):
        s = FlatCylinder()
        with pytest.raises(ChartDomainError):
            build_covering_witness(s, CauchySurface(1.0), "above",
                                   [s.point(1, 0)], [s.point(1.1, 0.1000001)])

    def test_description_round_trips_json(self, cyl_covering):
        _, cw = cyl_covering
        d = json.loads(json.dumps(cw.to_dict()))
        assert d["side"] == "above"
        assert d["n_generators"] == cw.n_generators
        assert d["certificate"]["ok"] is True

    def test_locality_bound_predicts_active_count(self, cyl_covering, rng):
        s, cw = cyl_covering
        for _ in range(100):
            z = s.point(rng.uniform(1.0, 3.0), rng.uniform(0, s.circumference))
            assert cw.active_generator_count(z) <= cw.active_generator_bound(z)


class TestEqualityWitness:
    def test_collinear_anchor_hits_distance_exactly(self, cyl):
        w = build_equality_witness(cyl, cyl.point(0, 0), cyl.point(1, 0), 0.01)
        d = w.delta()
        assert 1.0 <= d < 1.01
        assert d == pytest.approx(1.0, abs=1e-12)

    def test_value_is_anchor_distance_difference(self, cyl):
        w = build_equality_witness(cyl, cyl.point(0, 0), cyl.point(1.5, 0.8), 0.01)
        p_prime = w.aux_points["p_prime"]
        expect = (closed_form_distance(cyl, p_prime, cyl.point(1.5, 0.8))
                  - closed_form_distance(cyl, p_prime, cyl.point(0, 0)))
        assert w.delta() == pytest.approx(expect, abs=1e-9)

    def test_admissible_on_box(self, cyl):
        w = build_equality_witness(cyl, cyl.point(0, 0), cyl.point(1, 0), 0.01)
        grid = GridSpec(((-1.0, 2.0), (0.0, cyl.circumference)), (61, 61))
        rep = check_admissible(cyl, w.field, grid)
        assert rep.verdict

    @pytest.mark.parametrize("eps", [0.1, 0.001])
    def test_epsilon_contract(self, cyl, eps):
        w = build_equality_witness(cyl, cyl.point(0, 0), cyl.point(2, 1.3), eps)
        assert -1e-9 <= w.value_gap < eps

    def test_null_pair_supported(self, cyl):
        p, q = cyl.point(0, 0), cyl.point(1, 1)
        assert classify_pair(cyl, p, q).value == "null_boundary_future"
        w = build_equality_witness(cyl, p, q, 0.05)
        assert 0.0 <= w.delta() < 0.05

    def test_minkowski_window_construction(self):
        s = Minkowski(2)
        w = build_equality_witness(s, s.point(0, 0), s.point(1, 0.3), 0.01,
                                   window=(-6.0, 6.0))
        assert -1e-9 <= w.value_gap < 0.01
        grid = GridSpec(((-1.0, 2.0), (-2.0, 2.0)), (61, 61))
        assert check_admissible(s, w.field, grid).verdict

    def test_rejects_non_future_pair(self, cyl):
        with pytest.raises(PairNotFuture):
            build_equality_witness(cyl, cyl.point(1, 0), cyl.point(0, 0), 0.1)

    def test_lemma3_bound_on_other_pairs(self, cyl, rng):
        # a globally admissible witness bounds the distance for every
        # causally related pair, not just the one it was built for
        w = build_equality_witness(cyl, cyl.point(0, 0), cyl.point(1.2, 0.5), 0.01)
        for _ in range(200):
            p = cyl.point(rng.uniform(-0.8, 1.6), rng.uniform(0, cyl.circumference))
            dt = rng.uniform(0.05, 0.8)
            q = cyl.point(p.t + dt, p.coords[1] + rng.uniform(-0.9, 0.9) * dt)
            if classify_pair(cyl, p, q).is_future:
                assert lower_bound_slack(cyl, w.field, p, q) >= -1e-9


class TestReverseWitness:
    def test_positive_part_vanishes(self, cyl):
        w = build_reverse_witness(cyl, cyl.point(1, 0), cyl.point(0, 0))
        assert w.delta() <= 0.0
        assert w.positive_part() == 0.0

    def test_admissible(self, cyl):
        w = build_reverse_witness(cyl, cyl.point(1, 0), cyl.point(0, 0))
        grid = GridSpec(((-1.0, 2.0), (0.0, cyl.circumference)), (61, 61))
        assert check_admissible(cyl, w.field, grid).verdict

    def test_rejects_non_past_pair(self, cyl):
        with pytest.raises(PairNotPast):
            build_reverse_witness(cyl, cyl.point(0, 0), cyl.point(1, 0))


class TestUnrelatedWitness:
    def test_increment_below_epsilon(self, cyl):
        w = build_unrelated_witness(cyl, cyl.point(0, 2), cyl.point(0.3, 5), 0.05)
        assert abs(w.delta()) < 0.05

    def test_values_reduce_to_anchor_distances(self, cyl):
        w = build_unrelated_witness(cyl, cyl.point(0, 2), cyl.point(0.3, 5), 0.05)
        delta = w.offsets["anchor"]
        assert w.field.value(cyl.point(0, 2)) == pytest.approx(delta, abs=1e-12)
        assert w.field.value(cyl.point(0.3, 5)) == pytest.approx(delta, abs=1e-12)

    def test_admissible(self, cyl):
        w = build_unrelated_witness(cyl, cyl.point(0, 2), cyl.point(0.3, 5), 0.05)
        grid = GridSpec(((-1.0, 1.5), (0.0, cyl.circumference)), (61, 61))
        assert check_admissible(cyl, w.field, grid).verdict

    @pytest.mark.parametrize("eps", [0.1, 0.01])
    def test_epsilon_schedule(self, cyl, eps):
        w = build_unrelated_witness(cyl, cyl.point(0.2, 1), cyl.point(0, 4), eps)
        assert abs(w.delta()) < eps

    def test_swapped_roles_when_p_is_later(self, cyl):
        w = build_unrelated_witness(cyl, cyl.point(0.3, 5), cyl.point(0, 2), 0.05)
        assert abs(w.delta()) < 0.05

    def test_minkowski_window(self):
        s = Minkowski(2)
        w = build_unrelated_witness(s, s.point(0, 0), s.point(0, 2), 0.05,
                                    window=(-6.0, 8.0))
        assert abs(w.delta()) < 0.05

    def test_rejects_related_pair(self, cyl):
        with pytest.raises(PairNotUnrelated):
            build_unrelated_witness(cyl, cyl.point(0, 0), cyl.point(2, 0), 0.05)

import csv
import math

import numpy as np
import pytest

from lorentzdist import (FlatCylinder, GridSpec, Minkowski, affine_time_field,
                         check_admissible, classify_pair, closed_form_distance,
                         distance_field, eikonal_value, export_field_csv,
                         inverse_cauchy_schwarz_slack, inverse_triangle_slack,
                         lower_bound_slack)
from lorentzdist.errors import (ChainNotCausal, NonTimelikeInput,
                                PairNotCausal, UndefinedPoint)

from conftest import chrono_step, random_point


class TestEikonalValue:
    def test_time_function(self, mink2):
        f = affine_time_field(2)
        assert eikonal_value(mink2, f, mink2.point(0.3, 1.1)) == pytest.approx(-1.0)

    def test_scaled_time_function(self, mink2):
        f = affine_time_field(2, rate=2.0)
        assert eikonal_value(mink2, f, mink2.point(0, 0)) == pytest.approx(-4.0)

    def test_distance_field_satisfies_eikonal(self, mink2):
        f = distance_field(mink2, mink2.point(0, 0))
        assert abs(eikonal_value(mink2, f, mink2.point(3, 1)) + 1.0) < 1e-8

    def test_exclusion_radius(self, mink2):
        f = distance_field(mink2, mink2.point(0, 0))
        with pytest.raises(UndefinedPoint):
            eikonal_value(mink2, f, mink2.point(1.02, 1.0), exclusion_radius=0.05)

    def test_eikonal_on_random_interior(self, closed_form_spacetime, rng):
        s = closed_form_spacetime
        for _ in range(100):
            base = random_point(s, rng)
            z = chrono_step(s, rng, base, scale=2.0)
            f = distance_field(s, base)
            if f.margin(z) > 0.05:
                assert abs(eikonal_value(s, f, z) + 1.0) < 1e-8

    def test_central_difference_agreement(self, mink2):
        # single flat distance fields have a vanishing h^2 eikonal error term
        # (-f_t f_ttt + f_x f_xxx = 0 identically), so the order is measured
        # on a two-generator sum where no such cancellation happens
        from lorentzdist import combine_fields
        f = combine_fields("pair", [
            (1.0, distance_field(mink2, mink2.point(0, 0))),
            (1.0, distance_field(mink2, mink2.point(0.3, 0.4)))])
        z = mink2.point(2.0, 0.7)
        exact = eikonal_value(mink2, f, z)
        errs = {h: abs(eikonal_value(mink2, f.with_fd(h), z) - exact)
                for h in (1e-3, 1e-4)}
        assert errs[1e-4] < 1e-4
        order = math.log10(errs[1e-3] / errs[1e-4])
        assert order >= 1.9

    def test_central_difference_small_error_on_distance_field(self, mink2):
        f = distance_field(mink2, mink2.point(0, 0))
        z = mink2.point(2.0, 0.7)
        exact = eikonal_value(mink2, f, z)
        for h in (1e-3, 1e-4):
            assert abs(eikonal_value(mink2, f.with_fd(h), z) - exact) <= 10.0 * h ** 2


class TestCheckAdmissible:
    def grid(self):
        return GridSpec(((-3.0, 3.0), (-3.0, 3.0)), (101, 101))

    def test_time_function_passes(self, mink2):
        rep = check_admissible(mink2, affine_time_field(2), self.grid())
        assert rep.verdict
        assert rep.ess_sup_estimate == pytest.approx(-1.0)
        assert rep.violation_fraction == 0.0
        assert rep.orientation_ok

    def test_slow_clock_fails_eikonal_bound(self, mink2):
        rep = check_admissible(mink2, affine_time_field(2, rate=0.5), self.grid())
        assert not rep.verdict
        assert rep.ess_sup_estimate == pytest.approx(-0.25)
        assert any("ess_sup" in r for r in rep.failure_reasons)

    def test_reversed_clock_fails_orientation(self, mink2):
        rep = check_admissible(mink2, affine_time_field(2, rate=-1.0), self.grid())
        assert not rep.verdict
        assert not rep.orientation_ok
        assert rep.violation_fraction == 1.0

    def test_report_dict_round_trips_json(self, mink2):
        import json
        rep = check_admissible(mink2, affine_time_field(2), self.grid())
        assert json.loads(json.dumps(rep.to_dict()))["verdict"] is True

    def test_trim_absorbs_seam_samples(self, cyl):
        # d_p on a box inside its chronological future (t > C/2 puts the whole
        # circle inside the cone): the winding-tie seam is declared, so the
        # check passes with exclusion_radius = 0
        f = distance_field(cyl, cyl.point(0, 0))
        grid = GridSpec(((3.3, 4.5), (0.0, cyl.circumference)), (81, 81))
        rep = check_admissible(cyl, f, grid)
        assert rep.verdict

    def test_exclusion_radius_drops_samples(self, mink2):
        f = distance_field(mink2, mink2.point(0, 0))
        tight = GridSpec(((0.5, 2.0), (-1.0, 1.0)), (41, 41), exclusion_radius=0.0)
        loose = GridSpec(((0.5, 2.0), (-1.0, 1.0)), (41, 41), exclusion_radius=0.1)
        rep_tight = check_admissible(mink2, f, tight)
        rep_loose = check_admissible(mink2, f, loose)
        assert rep_loose.excluded_samples > rep_tight.excluded_samples


class TestInverseCauchySchwarz:
    def test_worked_example(self, mink2):
        x = mink2.point(0, 0)
        got = inverse_cauchy_schwarz_slack(
            mink2, x, mink2.vector(x, 1, 0), mink2.vector(x, 2, 1))
        assert got == pytest.approx(0.2679491924311228)

    def test_parallel_vectors_tight(self, mink2):
        x = mink2.point(0, 0)
        v = mink2.vector(x, 1, 0)
        assert inverse_cauchy_schwarz_slack(mink2, x, v, v) == pytest.approx(0.0)

    def test_second_example(self, mink2):
        x = mink2.point(0, 0)
        got = inverse_cauchy_schwarz_slack(
            mink2, x, mink2.vector(x, 1, 0), mink2.vector(x, 5, 3))
        assert got == pytest.approx(1.0)

    def test_rejects_non_timelike(self, mink2):
        x = mink2.point(0, 0)
        with pytest.raises(NonTimelikeInput):
            inverse_cauchy_schwarz_slack(
                mink2, x, mink2.vector(x, 1, 0), mink2.vector(x, 1, 2))

    def test_nonnegative_on_random_pairs(self, spacetime, rng):
        x_count = 0
        while x_count < 300:
            x = random_point(spacetime, rng)
            vt, wt = rng.uniform(0.5, 2, size=2)
            dim = spacetime.dim
            v = spacetime.vector(x, vt, *(rng.uniform(0, 0.9) * vt * rng.normal(size=dim - 1) / math.sqrt(dim - 1)))
            w = spacetime.vector(x, wt, *(rng.uniform(0, 0.9) * wt * rng.normal(size=dim - 1) / math.sqrt(dim - 1)))
            from lorentzdist import CausalClass
            if (spacetime.causal_character(x, v).causal_class is not CausalClass.TIMELIKE
                    or spacetime.causal_character(x, w).causal_class is not CausalClass.TIMELIKE):
                continue
            x_count += 1
            assert inverse_cauchy_schwarz_slack(spacetime, x, v, w) >= -1e-12


class TestInverseTriangle:
    def test_worked_example(self, mink2):
        got = inverse_triangle_slack(mink2, mink2.point(0, 0),
                                     mink2.point(1, 0.5), mink2.point(2, 0))
        assert got == pytest.approx(0.2679491924311228)

    def test_geodesic_chain_tight(self, mink2):
        got = inverse_triangle_slack(mink2, mink2.point(0, 0),
                                     mink2.point(1, 0), mink2.point(2, 0))
        assert got == pytest.approx(0.0)

    def test_cylinder_chain(self, cyl):
        # oracle: 4 - 2*sqrt(3) from per-leg winding enumeration
        got = inverse_triangle_slack(cyl, cyl.point(0, 0), cyl.point(2, 1),
                                     cyl.point(4, 0))
        assert got == pytest.approx(0.5358983848622456, abs=1e-12)

    def test_non_causal_chain_rejected(self, cyl):
        # both legs have time gap 2 below winding displacement 3
        with pytest.raises(ChainNotCausal):
            inverse_triangle_slack(cyl, cyl.point(0, 0), cyl.point(2, 3),
                                   cyl.point(4, 6))

    def test_nonnegative_on_random_chains(self, closed_form_spacetime, rng):
        s = closed_form_spacetime
        for _ in range(300):
            p = random_point(s, rng)
            q = chrono_step(s, rng, p)
            r = chrono_step(s, rng, q)
            assert inverse_triangle_slack(s, p, q, r) >= -1e-9


class TestLowerBoundSlack:
    def test_time_function_tight_on_pure_time(self, mink2):
        got = lower_bound_slack(mink2, affine_time_field(2),
                                mink2.point(0, 0), mink2.point(2, 0))
        assert got == pytest.approx(0.0)

    def test_time_function_slack_off_axis(self, mink2):
        got = lower_bound_slack(mink2, affine_time_field(2),
                                mink2.point(0, 0), mink2.point(2, 1))
        assert got == pytest.approx(2 - math.sqrt(3))

    def test_distance_field_tight_on_geodesic(self, mink2):
        f = distance_field(mink2, mink2.point(-1, 0))
        got = lower_bound_slack(mink2, f, mink2.point(0, 0), mink2.point(2, 0))
        assert got == pytest.approx(0.0, abs=1e-12)

    def test_requires_future_pair(self, mink2):
        with pytest.raises(PairNotCausal):
            lower_bound_slack(mink2, affine_time_field(2),
                              mink2.point(0, 0), mink2.point(0, 2))


def test_export_field_csv(tmp_path, mink2):
    f = affine_time_field(2)
    grid = GridSpec(((0.0, 1.0), (0.0, 1.0)), (5, 5))
    n = export_field_csv(mink2, f, grid, tmp_path / "grid.csv")
    with open(tmp_path / "grid.csv") as fh:
        rows = list(csv.reader(fh))
    assert rows[0] == ["t", "x1", "f", "eikonal", "past_directed"]
    assert len(rows) == n + 1 == 26
    t, x, val, eik, ok = rows[1]
    assert float(val) == float(t)  # f = t round-trips exactly
    assert float(eik) == -1.0
    assert ok == "1"

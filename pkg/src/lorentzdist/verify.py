"""Assemble the two-sided distance characterization and run property suites.

The upper bound is the infimum of positive-part increments over the
constructed admissible family (case witnesses per epsilon, seeded with the
affine-time and single-distance-field baselines); every candidate value is
gated by an independent admissibility re-check before it counts.  The lower
bound is the causal-path maximizer.  Sound bounds sandwich the closed form
where one exists.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field as dc_field

import numpy as np

from .causal import CauchySurface, CausalRelation, classify_pair, cone_trace_diameter
from .distance import (Curve, DistanceEstimate, closed_form_distance,
                       curve_length, distance_field, max_path_distance)
from .eikonal import (TOL_EIK_ANALYTIC, AdmissibilityReport, check_admissible,
                      eikonal_value, inverse_cauchy_schwarz_slack,
                      inverse_triangle_slack)
from .errors import WitnessRejected
from .fields import GridSpec, ScalarField, affine_time_field
from .geometry import ConformallyFlat, FlatCylinder, Minkowski, Point, Spacetime
from .witness import (WitnessField, _geodesic_direction, build_equality_witness,
                      build_reverse_witness, build_unrelated_witness)


@dataclass(frozen=True)
class Budget:
    """Desk-scale defaults: each sandwich pair runs in a few seconds."""

    n_segments: int = 8
    restarts: int = 20
    epsilons: tuple[float, ...] = (0.1, 0.01)
    seed: int = 0
    grid_resolution: int = 61
    box_pad: float = 0.75
    depth: float = 0.15
    quadrature_n: int = 16

    def to_dict(self) -> dict:
        return {"n_segments": self.n_segments, "restarts": self.restarts,
                "epsilons": list(self.epsilons), "seed": self.seed,
                "grid_resolution": self.grid_resolution, "box_pad": self.box_pad,
                "depth": self.depth, "quadrature_n": self.quadrature_n}

    @classmethod
    def from_dict(cls, d: dict) -> "Budget":
        d = dict(d)
        if "epsilons" in d:
            d["epsilons"] = tuple(d["epsilons"])
        return cls(**d)


def verification_box(s: Spacetime, pts, pad: float = 0.75):
    """Coordinate box around the points: full circle on the cylinder, cone-
    inflated spatial ranges elsewhere."""
    ts = [p.t for p in pts]
    t_lo, t_hi = min(ts) - pad, max(ts) + pad
    axes = [(t_lo, t_hi)]
    if isinstance(s, FlatCylinder):
        axes.append((0.0, s.circumference))
    else:
        spread = (t_hi - t_lo) + pad
        for axis in range(1, s.dim):
            vals = [p.coords[axis] for p in pts]
            axes.append((min(vals) - spread, max(vals) + spread))
    return tuple(axes)


def _grid(box, resolution: int, exclusion_radius: float = 0.0) -> GridSpec:
    return GridSpec(box=tuple(box), resolution=(resolution,) * len(box),
                    exclusion_radius=exclusion_radius)


def _witness_window(s: Spacetime, box) -> tuple[float, float] | None:
    if isinstance(s, FlatCylinder):
        return None
    height = box[0][1] - box[0][0]
    return (box[1][0] - height - 1.0, box[1][1] + height + 1.0)


def _witness_capable(s: Spacetime) -> bool:
    return isinstance(s, FlatCylinder) or (isinstance(s, Minkowski) and s.dim == 2)


def _gate(s: Spacetime, f: ScalarField, grid: GridSpec, label: str) -> AdmissibilityReport:
    report = check_admissible(s, f, grid)
    if not report.verdict:
        raise WitnessRejected(f"{label} failed admissibility: {report.failure_reasons}")
    return report


def _affine_rate(s: Spacetime, grid: GridSpec) -> float:
    if not isinstance(s, ConformallyFlat):
        return 1.0
    # must dominate the conformal factor on the causal diamond for the
    # increment to bound the distance; grid max plus headroom, then gated
    return float(np.max(s.conformal_scale_batch(grid.points()))) * (1.0 + 1e-3)


def _positive_part(x: float) -> float:
    return x if x > 0.0 else 0.0


def _variational(s: Spacetime, p: Point, q: Point, epsilons, budget: Budget) -> dict:
    rel = classify_pair(s, p, q)
    out = {"relation": rel.value, "epsilons": list(epsilons), "candidates": [],
           "witness_used": None, "admissibility": None}
    if rel is CausalRelation.EQUAL:
        out["value"] = 0.0
        return out
    eps = tuple(epsilons)
    if not eps or any(e <= 0 for e in eps) or list(eps) != sorted(eps, reverse=True):
        raise ValueError("epsilon schedule must be positive and decreasing")

    box = verification_box(s, [p, q], budget.box_pad)
    grid = _grid(box, budget.grid_resolution)
    window = _witness_window(s, box)

    candidates: list[tuple[str, float, WitnessField | None, AdmissibilityReport]] = []

    if s.has_closed_form and _witness_capable(s):
        if rel.is_future:
            for e in eps:
                w = build_equality_witness(s, p, q, e, depth=budget.depth,
                                           window=window)
                rep = _gate(s, w.field, grid, w.field.name)
                candidates.append((f"equality(eps={e})", w.positive_part(), w, rep))
        elif rel.is_past:
            w = build_reverse_witness(s, p, q, depth=budget.depth, window=window)
            rep = _gate(s, w.field, grid, w.field.name)
            candidates.append(("reverse", w.positive_part(), w, rep))
        else:
            for e in eps:
                w = build_unrelated_witness(s, p, q, e, depth=budget.depth,
                                            window=window)
                rep = _gate(s, w.field, grid, w.field.name)
                candidates.append((f"unrelated(eps={e})", w.positive_part(), w, rep))

    rate = _affine_rate(s, grid)
    affine = affine_time_field(s.dim, rate)
    rep = _gate(s, affine, grid, affine.name)
    candidates.append((affine.name,
                       _positive_part(affine.value(q) - affine.value(p)),
                       None, rep))

    if s.has_closed_form and rel.is_future:
        # single distance-field baseline, certified on a box inside its cone
        delta = 1e-3
        u = _geodesic_direction(s, p, q)
        p_prime = Point(s.canonical((p.t - delta * u[0], p.coords[1] - delta * u[1])))
        base = distance_field(s, p_prime, "from_base")
        w_half = 0.3 * delta * u[0]
        inscribed = _grid(((p.t, max(q.t, p.t + 0.5)),
                           (p.coords[1] - w_half, p.coords[1] + w_half)), 21)
        rep = _gate(s, base, inscribed, base.name)
        candidates.append((base.name,
                           _positive_part(base.value(q) - base.value(p)),
                           None, rep))

    best = min(range(len(candidates)), key=lambda i: candidates[i][1])
    label, value, witness, rep = candidates[best]
    out["value"] = value
    out["candidates"] = [(lab, val) for lab, val, _, _ in candidates]
    out["witness_used"] = witness.to_dict() if witness is not None else {"baseline": label}
    out["admissibility"] = rep.to_dict()
    return out


def variational_distance(s: Spacetime, p: Point, q: Point,
                         epsilons=(0.1, 0.01), budget: Budget | None = None) -> float:
    """Infimum of max(0, f(q) - f(p)) over the gated admissible family."""
    return _variational(s, p, q, epsilons, budget or Budget())["value"]


@dataclass(frozen=True)
class SandwichReport:
    spacetime: dict
    p: tuple[float, ...]
    q: tuple[float, ...]
    relation: str
    estimate: DistanceEstimate
    witness_used: dict | None
    admissibility: dict | None
    candidates: list
    epsilons: tuple[float, ...]
    budget: Budget

    def to_dict(self) -> dict:
        return {
            "schema_version": 1,
            "command": "sandwich",
            "spacetime": self.spacetime,
            "points": {"p": list(self.p), "q": list(self.q)},
            "budget": self.budget.to_dict(),
            "relation": self.relation,
            "estimate": {
                "lower": self.estimate.lower,
                "upper": self.estimate.upper,
                "closed_form": self.estimate.closed_form,
                "gap": self.estimate.gap,
            },
            "witness_used": self.witness_used,
            "admissibility": self.admissibility,
            "candidates": [list(c) for c in self.candidates],
            "epsilons": list(self.epsilons),
        }


def sandwich_report(s: Spacetime, p: Point, q: Point,
                    budget: Budget | None = None) -> SandwichReport:
    """Lower (paths) and upper (admissible functions) bounds around the
    closed form; raises ContractViolation when the sandwich breaks."""
    from .errors import ContractViolation

    budget = budget or Budget()
    p = Point(s.canonical(p.coords))
    q = Point(s.canonical(q.coords))
    rel = classify_pair(s, p, q)
    if rel.is_future:
        lower = max_path_distance(s, p, q, budget.n_segments, budget.restarts,
                                  budget.seed, budget.quadrature_n)
    else:
        lower = 0.0
    closed = closed_form_distance(s, p, q) if s.has_closed_form else None
    var = _variational(s, p, q, budget.epsilons, budget)
    upper = var["value"]

    if upper - lower < -TOL_EIK_ANALYTIC:
        raise ContractViolation(f"upper {upper} fell below lower {lower}")
    if closed is not None:
        if lower > closed + 1e-9:
            raise ContractViolation(f"path lower {lower} exceeds closed form {closed}")
        if closed > upper + TOL_EIK_ANALYTIC:
            raise ContractViolation(f"upper {upper} fell below closed form {closed}")
        if (rel.is_past or rel is CausalRelation.UNRELATED) and not upper < budget.epsilons[-1]:
            raise ContractViolation(
                f"{rel.value} pair got nonvanishing upper bound {upper}")

    return SandwichReport(
        spacetime=s.spec(), p=p.coords, q=q.coords, relation=rel.value,
        estimate=DistanceEstimate(lower=lower, upper=upper, closed_form=closed),
        witness_used=var["witness_used"], admissibility=var["admissibility"],
        candidates=var["candidates"], epsilons=tuple(budget.epsilons),
        budget=budget)


def replay_sandwich(report: dict) -> dict:
    """Re-run a sandwich from its own report; deterministic, so the result
    must match the original bit for bit."""
    from .geometry import spacetime_from_spec

    s = spacetime_from_spec(report["spacetime"])
    p = s.point(*report["points"]["p"])
    q = s.point(*report["points"]["q"])
    return sandwich_report(s, p, q, Budget.from_dict(report["budget"])).to_dict()


# ---------------------------------------------------------------------------
# property suite
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class PropertyResult:
    name: str
    trials: int
    failures: int
    worst_slack: float
    runtime_s: float

    @property
    def passed(self) -> bool:
        return self.failures == 0


@dataclass(frozen=True)
class SuiteReport:
    spacetime: dict
    seed: int
    results: tuple[PropertyResult, ...] = dc_field(default=())

    @property
    def all_passed(self) -> bool:
        return all(r.passed for r in self.results)

    def to_dict(self) -> dict:
        return {
            "schema_version": 1,
            "command": "suite",
            "spacetime": self.spacetime,
            "seed": self.seed,
            "all_passed": self.all_passed,
            "properties": [
                {"name": r.name, "trials": r.trials, "failures": r.failures,
                 "worst_slack": r.worst_slack, "runtime_s": r.runtime_s}
                for r in self.results],
        }

    def csv_rows(self) -> list[list]:
        rows = [["property", "trials", "failures", "worst_slack", "runtime_s"]]
        for r in self.results:
            rows.append([r.name, r.trials, r.failures, repr(r.worst_slack),
                         repr(r.runtime_s)])
        return rows


def _sample_point(s: Spacetime, rng) -> Point:
    t = rng.uniform(-3.0, 3.0)
    if isinstance(s, FlatCylinder):
        return s.point(t, rng.uniform(0.0, s.circumference))
    return s.point(t, *rng.uniform(-3.0, 3.0, size=s.dim - 1))


def _causal_step(s: Spacetime, rng, p: Point, scale: float = 1.0) -> Point:
    """A point strictly inside I+(p), one coordinate step away."""
    dt = rng.uniform(0.1, 0.1 + scale)
    frac = rng.uniform(0.0, 0.9)
    direction = rng.normal(size=s.dim - 1)
    norm = np.linalg.norm(direction)
    direction = direction / norm if norm > 0 else np.zeros(s.dim - 1)
    dx = frac * dt * direction
    if isinstance(s, FlatCylinder):
        dx = np.clip(dx, -0.45 * s.circumference, 0.45 * s.circumference)
    return s.point(p.t + dt, *(np.asarray(p.spatial) + dx))


def _timelike_vector(s: Spacetime, rng, x: Point, orientation: float = 1.0):
    vt = orientation * rng.uniform(0.5, 2.0)
    frac = rng.uniform(0.0, 0.9)
    direction = rng.normal(size=s.dim - 1)
    norm = np.linalg.norm(direction)
    direction = direction / norm if norm > 0 else np.zeros(s.dim - 1)
    return s.vector(x, vt, *(frac * abs(vt) * direction))


def property_suite(s: Spacetime, seed: int = 0, trials: int = 1000) -> SuiteReport:
    """Seeded randomized run of every module invariant that applies to s."""
    if trials < 1:
        raise ValueError("trials must be >= 1")
    results = []

    def run(name, fn, idx):
        rng = np.random.default_rng([seed, idx])
        t0 = time.perf_counter()
        n, failures, worst = fn(rng)
        results.append(PropertyResult(name, int(n), int(failures), float(worst),
                                      time.perf_counter() - t0))

    def metric_signature(rng):
        failures, worst = 0, math.inf
        for _ in range(trials):
            x = _sample_point(s, rng)
            eig = np.linalg.eigvalsh(s.metric_components(x))
            ok = eig[0] < 0 and np.all(eig[1:] > 0)
            failures += not ok
            worst = min(worst, -eig[0], float(np.min(eig[1:])))
        return trials, failures, worst

    def gradient_duality(rng):
        failures, worst = 0, math.inf
        for _ in range(trials):
            x = _sample_point(s, rng)
            df = rng.uniform(-2, 2, size=s.dim)
            u = s.vector(x, *rng.uniform(-2, 2, size=s.dim))
            v = s.raise_gradient(x, df)
            err = abs(s.inner(x, v, u) - float(df @ u.array()))
            margin = 1e-12 * max(1.0, float(np.abs(df) @ np.abs(u.array()))) - err
            failures += margin < 0
            worst = min(worst, margin)
        return trials, failures, worst

    def causal_scaling(rng):
        failures = 0
        for _ in range(trials):
            x = _sample_point(s, rng)
            v = s.vector(x, *rng.normal(size=s.dim))
            lam = rng.uniform(0.1, 10.0)
            a = s.causal_character(x, v)
            b = s.causal_character(x, v.scaled(lam))
            c = s.causal_character(x, v.scaled(-1.0))
            ok = a.causal_class == b.causal_class and a.orientation == b.orientation
            flip = {"future": "past", "past": "future", "none": "none"}
            ok = ok and c.orientation.value == flip[a.orientation.value]
            failures += not ok
        return trials, failures, 0.0

    def antisymmetry(rng):
        mirror = {"equal": "equal", "unrelated": "unrelated",
                  "chronological_future": "chronological_past",
                  "chronological_past": "chronological_future",
                  "null_boundary_future": "null_boundary_past",
                  "null_boundary_past": "null_boundary_future"}
        failures = 0
        for _ in range(trials):
            p_, q_ = _sample_point(s, rng), _sample_point(s, rng)
            failures += mirror[classify_pair(s, p_, q_).value] != classify_pair(s, q_, p_).value
        return trials, failures, 0.0

    def transitivity(rng):
        failures = 0
        for _ in range(trials):
            p_ = _sample_point(s, rng)
            q_ = _causal_step(s, rng, p_)
            r_ = _causal_step(s, rng, q_)
            failures += not classify_pair(s, p_, r_).is_future
        return trials, failures, 0.0

    def matches_distance(rng):
        failures = 0
        for _ in range(trials):
            p_, q_ = _sample_point(s, rng), _sample_point(s, rng)
            chrono = classify_pair(s, p_, q_) is CausalRelation.CHRONOLOGICAL_FUTURE
            failures += chrono != (closed_form_distance(s, p_, q_) > 0)
        return trials, failures, 0.0

    def trace_continuity(rng):
        failures, worst = 0, math.inf
        for _ in range(trials):
            x = _sample_point(s, rng)
            h = rng.uniform(1e-3, 0.5)
            surf = CauchySurface(x.t + h)
            diam = cone_trace_diameter(s, x, surf)
            omega_cap = 1.0
            if isinstance(s, ConformallyFlat):
                xs = np.linspace(x.coords[1] - h, x.coords[1] + h, 9)
                omega_cap = float(np.max(s.factor.fn(np.full_like(xs, surf.level), xs)))
            margin = 2.0 * h * omega_cap * (1.0 + 1e-9) - diam
            failures += (margin < 0) or (diam <= 0)
            worst = min(worst, margin)
        return trials, failures, worst

    def reparametrization(rng):
        failures, worst = 0, math.inf
        for _ in range(trials):
            p_ = _sample_point(s, rng)
            q_ = _causal_step(s, rng, p_)
            mid = Point(tuple(0.5 * (pa + qa) for pa, qa in zip(p_.coords, q_.coords)))
            one = curve_length(s, Curve((p_, q_)))
            two = curve_length(s, Curve((p_, mid, q_)))
            margin = 1e-10 - abs(one - two)
            failures += margin < 0
            worst = min(worst, margin)
        return trials, failures, worst

    def path_bound(rng):
        n = max(1, trials // 50)
        failures, worst = 0, math.inf
        for _ in range(n):
            p_ = _sample_point(s, rng)
            q_ = _causal_step(s, rng, p_)
            got = max_path_distance(s, p_, q_, n_segments=4, restarts=3,
                                    seed=int(rng.integers(2 ** 31)))
            slack = closed_form_distance(s, p_, q_) + 1e-9 - got
            failures += slack < 0
            worst = min(worst, slack)
        return n, failures, worst

    def triangle(rng):
        failures, worst = 0, math.inf
        for _ in range(trials):
            p_ = _sample_point(s, rng)
            q_ = _causal_step(s, rng, p_)
            r_ = _causal_step(s, rng, q_)
            slack = inverse_triangle_slack(s, p_, q_, r_)
            failures += slack < -1e-9
            worst = min(worst, slack)
        return trials, failures, worst

    def cauchy_schwarz(rng):
        failures, worst = 0, math.inf
        for _ in range(trials):
            x = _sample_point(s, rng)
            v = _timelike_vector(s, rng, x)
            w = _timelike_vector(s, rng, x)
            slack = inverse_cauchy_schwarz_slack(s, x, v, w)
            failures += slack < -1e-12
            worst = min(worst, slack)
        return trials, failures, worst

    def monotone(rng):
        failures, worst = 0, math.inf
        for _ in range(trials):
            base = _sample_point(s, rng)
            f = distance_field(s, base, "from_base")
            z = _sample_point(s, rng)
            prev = f.value(z)
            for _ in range(4):
                z = _causal_step(s, rng, z, scale=0.5)
                cur = f.value(z)
                inc = cur - prev
                failures += inc < -1e-12
                worst = min(worst, inc)
                prev = cur
        return trials * 4, failures, worst

    def _eik_samples(rng, margin_floor):
        base = _sample_point(s, rng)
        f = distance_field(s, base, "from_base")
        pts = []
        tries = 0
        while len(pts) < 1 and tries < 200:
            tries += 1
            z = _causal_step(s, rng, base, scale=2.0)
            if f.margin(z) > margin_floor:
                pts.append(z)
        return base, f, pts

    def eik_analytic(rng):
        failures, worst = 0, math.inf
        for _ in range(trials):
            _, f, pts = _eik_samples(rng, 0.05)
            for z in pts:
                margin = 1e-8 - abs(eikonal_value(s, f, z) + 1.0)
                failures += margin < 0
                worst = min(worst, margin)
        return trials, failures, worst

    def eik_fd(rng):
        n = max(1, trials // 10)
        failures, worst = 0, math.inf
        for _ in range(n):
            _, f, pts = _eik_samples(rng, 0.05)
            for z in pts:
                margin = 1e-4 - abs(eikonal_value(s, f.with_fd(1e-4), z) + 1.0)
                failures += margin < 0
                worst = min(worst, margin)
        return n, failures, worst

    def fd_order(rng):
        # a single flat distance field has an exactly vanishing h^2 eikonal
        # error term, so the order is measured on two-generator sums
        from .fields import combine_fields
        n = min(trials, 50)
        errs = {1e-3: 0.0, 1e-4: 0.0}
        count = 0
        for _ in range(20 * n):
            if count >= n:
                break
            base, f1, pts = _eik_samples(rng, 0.3)
            other = _causal_step(s, rng, base, scale=0.3)
            f = combine_fields("pair", [
                (1.0, f1), (1.0, distance_field(s, other, "from_base"))])
            for z in pts:
                if f.margin(z) <= 0.3:
                    continue
                exact = eikonal_value(s, f, z)
                for h in errs:
                    errs[h] = max(errs[h], abs(eikonal_value(s, f.with_fd(h), z) - exact))
                count += 1
        order = math.log10(errs[1e-3] / errs[1e-4]) if errs[1e-4] > 0 else 2.0
        slack = order - 1.9
        return count, int(slack < 0), slack

    def orientation_split(rng):
        p0 = s.point(0.0, *([0.0] * (s.dim - 1)))
        q0 = s.point(1.0, *([0.0] * (s.dim - 1)))
        rate = 2.0 if isinstance(s, ConformallyFlat) else 1.0
        fields = [affine_time_field(s.dim, rate), affine_time_field(s.dim, rate + 1, -0.3)]
        if s.has_closed_form:
            fields.append(distance_field(s, s.point(-0.5, *([0.0] * (s.dim - 1)))))
        d0 = closed_form_distance(s, p0, q0) if s.has_closed_form else 0.0
        failures, worst = 0, math.inf
        for f in fields:
            margin = (f.value(q0) - f.value(p0)) - d0
            failures += (margin < -1e-12) or (f.value(q0) - f.value(p0) <= 0)
            worst = min(worst, margin)
        return len(fields), failures, worst

    props = [
        ("metric_signature", metric_signature),
        ("gradient_duality", gradient_duality),
        ("causal_scaling", causal_scaling),
        ("classify_antisymmetry", antisymmetry),
        ("classify_transitivity", transitivity),
        ("cone_trace_continuity", trace_continuity),
        ("curve_reparametrization", reparametrization),
        ("inverse_cauchy_schwarz", cauchy_schwarz),
        ("orientation_split", orientation_split),
    ]
    if s.has_closed_form:
        props += [
            ("classify_matches_distance", matches_distance),
            ("path_lower_bound", path_bound),
            ("inverse_triangle", triangle),
            ("distance_monotone_causal", monotone),
            ("eikonal_analytic", eik_analytic),
            ("eikonal_central_difference", eik_fd),
            ("fd_convergence_order", fd_order),
        ]
    for idx, (name, fn) in enumerate(props):
        run(name, fn, idx)
    return SuiteReport(spacetime=s.spec(), seed=seed, results=tuple(results))

"""Explicit admissible witness functions.

Covering witnesses sum distance fields from a deterministic generator set
placed just off a Cauchy surface, so the sum has unit-eikonal past-directed
gradient on one side of the surface while vanishing on prescribed causal
pasts.  The three case witnesses (equality / reverse / unrelated) assemble
two coverings and one or two distance fields into globally admissible
functions whose increment between two chosen points realizes the distance to
within a requested epsilon.

Constructions run on FlatCylinder (compact surface) and window-truncated
Minkowski(2).  Generator placement: a base layer at the given depth stepped
by depth*(1-overlap), plus dyadic refinement layers (depth/2^l, same
stepping rule) near each excluded point until the residual gap around its
cone trace fits strictly inside the matching guard's trace.  With
refine=False only the base layer is used and tight guards fail loudly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .causal import (CauchySurface, CausalRelation, classify_pair,
                     surface_relation)
from .distance import closed_form_distance, distance_field
from .errors import (ChartDomainError, ContractViolation, CoverageImpossible,
                     DisjointTracesImpossible, PairNotFuture, PairNotPast,
                     PairNotUnrelated, ToolkitError, UnsupportedSpacetime)
from .fields import ScalarField, combine_fields, support_restricted
from .geometry import FlatCylinder, Minkowski, Point, Spacetime
from .intervals import (CoverageCertificate, circle_cover_certificate,
                        line_cover_certificate)

_POINT_CHUNK = 8192
_MAX_HALVINGS = 200


@dataclass(frozen=True)
class GeneratorLayer:
    depth: float
    step: float
    positions: tuple[float, ...]


@dataclass(frozen=True)
class CoveringWitness:
    spacetime: Spacetime
    surface: CauchySurface
    side: str  # "above": positive on J+(S) side; "below": time-reversed
    excluded: tuple[Point, ...]
    guards: tuple[Point, ...]
    layers: tuple[GeneratorLayer, ...]
    field: ScalarField
    base_depth: float
    r_max: float
    overlap: float
    window: tuple[float, float] | None
    certificate: CoverageCertificate

    @property
    def sign(self) -> float:
        return 1.0 if self.side == "above" else -1.0

    @property
    def n_generators(self) -> int:
        return sum(len(layer.positions) for layer in self.layers)

    @property
    def generators(self) -> tuple[Point, ...]:
        tau = self.surface.level
        pts = []
        for layer in self.layers:
            t_gen = tau - self.sign * layer.depth
            pts.extend(Point(self.spacetime.canonical((t_gen, pos)))
                       for pos in layer.positions)
        return tuple(pts)

    def _arrays(self):
        pos = np.concatenate([np.asarray(l.positions) for l in self.layers])
        dep = np.concatenate([np.full(len(l.positions), l.depth) for l in self.layers])
        return pos, dep

    def generator_geometry(self, coords: np.ndarray):
        """Per-generator (dt, signed displacement, separation) at each point."""
        s = self.spacetime
        pos, dep = self._arrays()
        coords = np.asarray(coords, dtype=float)
        dt = self.sign * (coords[:, 0][:, None] - self.surface.level) + dep[None, :]
        dx = coords[:, 1][:, None] - pos[None, :]
        if isinstance(s, FlatCylinder):
            dx = s.wrap_signed_batch(dx)
        return dt, dx, np.abs(dx)

    def generator_covectors(self, z: Point) -> np.ndarray:
        """Differential of each generator's distance field at z (0 if inactive)."""
        dt, dx, sep = self.generator_geometry(z.array()[None, :])
        dt, dx, sep = dt[0], dx[0], sep[0]
        rad = dt * dt - sep * sep
        active = (dt > 0) & (rad > 0)
        d = np.sqrt(np.where(active, rad, 1.0))
        out = np.zeros((len(dt), 2))
        out[active, 0] = self.sign * dt[active] / d[active]
        out[active, 1] = -dx[active] / d[active]
        return out

    def active_generator_count(self, z: Point) -> int:
        dt, _, sep = self.generator_geometry(z.array()[None, :])
        return int(np.count_nonzero((dt[0] > 0) & (dt[0] > sep[0])))

    def active_generator_bound(self, z: Point) -> int:
        """Cone-geometry bound on the active count: at height h off the
        surface a layer's generators reach at most h + depth in position."""
        h = self.sign * (z.t - self.surface.level)
        bound = 0
        for layer in self.layers:
            reach = h + layer.depth
            if reach <= 0:
                continue
            bound += min(len(layer.positions), int(2.0 * reach / layer.step) + 2)
        return bound

    def support_field(self) -> ScalarField:
        """Field with margin zeroed where no generator cone is entered; the
        covering's guarantees are claimed only where the field is positive."""
        def batch_support(coords):
            dt, _, sep = self.generator_geometry(coords)
            any_active = np.any((dt > 0) & (dt > sep), axis=1)
            return np.where(any_active, np.inf, 0.0)

        def support_margin(x: Point) -> float:
            return float(batch_support(x.array()[None, :])[0])

        return support_restricted(self.field, support_margin, batch_support)

    def to_dict(self) -> dict:
        return {
            "side": self.side,
            "surface_level": self.surface.level,
            "excluded": [list(e.coords) for e in self.excluded],
            "guards": [list(g.coords) for g in self.guards],
            "base_depth": self.base_depth,
            "r_max": self.r_max,
            "overlap": self.overlap,
            "window": list(self.window) if self.window else None,
            "n_generators": self.n_generators,
            "layers": [{"depth": l.depth, "step": l.step,
                        "positions": list(l.positions)} for l in self.layers],
            "certificate": {"ok": self.certificate.ok,
                            "uncovered": [list(iv) for iv in self.certificate.uncovered],
                            "shrink": self.certificate.shrink},
        }


def _sep1(s: Spacetime, a: float, b: float) -> float:
    if isinstance(s, FlatCylinder):
        return abs(s.wrap_signed(b - a))
    return abs(b - a)


def _covering_field(s: Spacetime, surface: CauchySurface, side: str,
                    layers: tuple[GeneratorLayer, ...], name: str) -> ScalarField:
    sign = 1.0 if side == "above" else -1.0
    pos = np.concatenate([np.asarray(l.positions) for l in layers])
    dep = np.concatenate([np.full(len(l.positions), l.depth) for l in layers])
    tau = surface.level
    cylinder = isinstance(s, FlatCylinder)
    half = s.circumference / 2.0 if cylinder else math.inf

    def _geom(chunk: np.ndarray):
        dt = sign * (chunk[:, 0][:, None] - tau) + dep[None, :]
        dx = chunk[:, 1][:, None] - pos[None, :]
        if cylinder:
            dx = s.wrap_signed_batch(dx)
        return dt, dx, np.abs(dx)

    def _chunks(coords: np.ndarray):
        coords = np.asarray(coords, dtype=float)
        for i in range(0, len(coords), _POINT_CHUNK):
            yield i, coords[i:i + _POINT_CHUNK]

    def batch_evaluator(coords: np.ndarray) -> np.ndarray:
        coords = np.asarray(coords, dtype=float)
        out = np.empty(len(coords))
        for i, chunk in _chunks(coords):
            dt, _, sep = _geom(chunk)
            rad = dt * dt - sep * sep
            act = (dt > 0) & (rad > 0)
            out[i:i + len(chunk)] = np.sum(np.sqrt(np.where(act, rad, 0.0)), axis=1)
        return out

    def _margin_chunk(dt, sep):
        margin = np.min(np.abs(dt - sep), axis=1)
        if cylinder:
            act = (dt > 0) & (dt > sep)
            tie = np.where(act, half - sep, np.inf)
            margin = np.minimum(margin, np.min(tie, axis=1))
        return margin

    def batch_margin(coords: np.ndarray) -> np.ndarray:
        coords = np.asarray(coords, dtype=float)
        out = np.empty(len(coords))
        for i, chunk in _chunks(coords):
            dt, _, sep = _geom(chunk)
            out[i:i + len(chunk)] = _margin_chunk(dt, sep)
        return out

    def batch_covector(coords: np.ndarray) -> np.ndarray:
        coords = np.asarray(coords, dtype=float)
        out = np.zeros_like(coords)
        for i, chunk in _chunks(coords):
            dt, dx, sep = _geom(chunk)
            rad = dt * dt - sep * sep
            act = (dt > 0) & (rad > 0)
            d = np.sqrt(np.where(act, rad, 1.0))
            out[i:i + len(chunk), 0] = np.sum(
                np.where(act, sign * dt / d, 0.0), axis=1)
            out[i:i + len(chunk), 1] = np.sum(np.where(act, -dx / d, 0.0), axis=1)
            seam = _margin_chunk(dt, sep) <= 0.0
            out[i:i + len(chunk)][seam] = np.nan
        return out

    return ScalarField(
        name=name,
        dim=2,
        evaluator=lambda x: float(batch_evaluator(x.array()[None, :])[0]),
        covector_rule=lambda x: batch_covector(x.array()[None, :])[0],
        seam_margin=lambda x: float(batch_margin(x.array()[None, :])[0]),
        batch_evaluator=batch_evaluator,
        batch_covector=batch_covector,
        batch_margin=batch_margin,
    )


def build_covering_witness(s: Spacetime, surface: CauchySurface, side: str,
                           excluded, guards, depth: float = 0.15,
                           r_max: float = 1.0, overlap: float = 0.25,
                           refine: bool = True,
                           window: tuple[float, float] | None = None,
                           shrink: float = 1e-9,
                           max_layers: int = 40) -> CoveringWitness:
    """Deterministic covering witness over the surface.

    The certificate (exact interval union on the surface trace) is the
    authority: if the generator arcs fail to cover the surface outside the
    guards' traces, CoverageImpossible reports the uncovered pieces.
    """
    if side not in ("above", "below"):
        raise ChartDomainError(f"side must be above/below, got {side}")
    cylinder = isinstance(s, FlatCylinder)
    if not cylinder:
        if not (isinstance(s, Minkowski) and s.dim == 2):
            raise UnsupportedSpacetime(
                "covering witnesses need FlatCylinder or Minkowski(2)")
        if window is None:
            raise ChartDomainError("Minkowski coverings need a window (x_lo, x_hi)")
    excluded = tuple(Point(s.canonical(e.coords)) for e in excluded)
    guards = tuple(Point(s.canonical(g.coords)) for g in guards)
    if not 1 <= len(excluded) <= 2 or len(guards) != len(excluded):
        raise ChartDomainError("need 1-2 excluded points, one guard each")
    if not 0 < overlap < 1:
        raise ChartDomainError("overlap must be in (0,1)")
    if not 2.0 * depth < r_max:
        raise ChartDomainError(f"trace diameter 2*{depth} must stay below r_max={r_max}")
    if cylinder and not 2.0 * depth < s.circumference / 2.0:
        raise ChartDomainError("depth too large for the cylinder circumference")

    sign = 1.0 if side == "above" else -1.0
    tau = surface.level
    rho, guard_radius = [], []
    for e, g in zip(excluded, guards):
        re = sign * (e.t - tau)
        if re < 0:
            raise ChartDomainError(
                f"excluded point {e} is on the wrong side of the surface t={tau}")
        want = (CausalRelation.CHRONOLOGICAL_FUTURE if side == "above"
                else CausalRelation.CHRONOLOGICAL_PAST)
        if classify_pair(s, e, g) is not want:
            raise ChartDomainError(f"guard {g} is not strictly {side} excluded point {e}")
        rho.append(re)
        guard_radius.append(sign * (g.t - tau))

    def skipped(pos: float, d: float) -> bool:
        return any(_sep1(s, e.coords[1], pos) <= re + d
                   for e, re in zip(excluded, rho))

    # base layer
    step0 = depth * (1.0 - overlap)
    if cylinder:
        count = math.ceil(s.circumference / step0)
        base = [j * step0 for j in range(count)]
    else:
        count = math.ceil((window[1] - window[0]) / step0) + 2
        base = [window[0] + (j - 1) * step0 for j in range(count + 1)]
    layers = [GeneratorLayer(depth, step0,
                             tuple(p for p in base if not skipped(p, depth)))]

    # dyadic refinement near each excluded point until the residual gap fits
    # strictly inside the matching guard's trace
    if refine:
        for e, re, rg in zip(excluded, rho, guard_radius):
            margin = rg - re
            if margin <= 0:
                raise CoverageImpossible(
                    f"guard trace radius {rg} does not exceed excluded trace {re}")
            n_layers = 0
            while 2.0 * depth / 2.0 ** n_layers > 0.9 * margin:
                n_layers += 1
                if n_layers > max_layers:
                    raise CoverageImpossible(
                        f"guard margin {margin} needs more than {max_layers} "
                        "refinement layers")
            for lev in range(1, n_layers + 1):
                d = depth / 2.0 ** lev
                st = d * (1.0 - overlap)
                inner = re + d
                outer = re + 2.0 * (depth / 2.0 ** (lev - 1)) + (depth / 2.0 ** (lev - 1)) * (1 - overlap)
                positions = []
                j = 1
                while inner + j * st <= outer + st:
                    for sgn_x in (1.0, -1.0):
                        pos = e.coords[1] + sgn_x * (inner + j * st)
                        if cylinder:
                            pos %= s.circumference
                        elif not window[0] - depth <= pos <= window[1] + depth:
                            continue
                        if not skipped(pos, d):
                            positions.append(pos)
                    j += 1
                if positions:
                    layers.append(GeneratorLayer(d, st, tuple(sorted(positions))))

    gen_arcs = [(p, layer.depth) for layer in layers for p in layer.positions]
    if not gen_arcs:
        raise CoverageImpossible(
            "excluded pasts leave no room for any generator at this depth")
    guard_arcs = [(g.coords[1], rg) for g, rg in zip(guards, guard_radius)]
    if cylinder:
        cert = circle_cover_certificate(s.circumference, gen_arcs, guard_arcs, shrink)
    else:
        cert = line_cover_certificate(window, gen_arcs, guard_arcs, shrink)
    if not cert.ok:
        raise CoverageImpossible(
            f"{side} covering at t={tau}: generator traces miss the surface pieces "
            f"{cert.uncovered[:4]}{'...' if len(cert.uncovered) > 4 else ''} "
            f"(guards too tight for depth {depth})", uncovered=cert.uncovered)

    name = f"covering_{side}(tau={tau}, gens={len(gen_arcs)})"
    field = _covering_field(s, surface, side, tuple(layers), name)
    return CoveringWitness(
        spacetime=s, surface=surface, side=side, excluded=excluded, guards=guards,
        layers=tuple(layers), field=field, base_depth=depth, r_max=r_max,
        overlap=overlap, window=window, certificate=cert)


# ---------------------------------------------------------------------------
# sampled invariants of a covering witness
# ---------------------------------------------------------------------------


def verify_covering_invariants(cw: CoveringWitness, seed: int = 0,
                               n_samples: int = 200, height: float = 1.5) -> dict:
    """Sampled checks of the covering bullets; the caller asserts on the values.

    Returns worst-case numbers: max |field| over the excluded pasts, min field
    over the guarded far side, max cross-term pairing, and the locality bound
    check.
    """
    s = cw.spacetime
    rng = np.random.default_rng([seed, 17])
    sign = cw.sign
    tau = cw.surface.level
    cylinder = isinstance(s, FlatCylinder)

    zero_pts = []
    for i in range(n_samples):
        e = cw.excluded[i % len(cw.excluded)]
        w = s.circumference / 2.0 if cylinder else height + max(
            sign * (e.t - tau), 0.0)
        dx = rng.uniform(-w, w)
        u = rng.uniform(0.0, height)
        m = abs(s.wrap_signed(dx)) if cylinder else abs(dx)
        zero_pts.append((e.t - sign * (m + u), e.coords[1] + dx))
    zero_vals = cw.field.values(np.asarray(zero_pts))
    zero_max_abs = float(np.max(np.abs(zero_vals)))

    pos_pts = []
    tries = 0
    while len(pos_pts) < n_samples and tries < 100 * n_samples:
        tries += 1
        u = rng.uniform(0.0, height)
        if cylinder:
            x = rng.uniform(0.0, s.circumference)
        else:
            x = rng.uniform(cw.window[0] + u + cw.base_depth,
                            cw.window[1] - u - cw.base_depth)
        z = Point(s.canonical((tau + sign * u, x)))
        inside_guard = any(
            classify_pair(s, z, g) is CausalRelation.CHRONOLOGICAL_FUTURE
            if cw.side == "above"
            else classify_pair(s, g, z) is CausalRelation.CHRONOLOGICAL_FUTURE
            for g in cw.guards)
        if not inside_guard:
            pos_pts.append(z)
    pos_vals = cw.field.values(np.asarray([p.coords for p in pos_pts]))
    positive_min = float(np.min(pos_vals)) if pos_pts else math.nan

    cross_max = -math.inf
    locality_ok = True
    for z in pos_pts[: min(50, len(pos_pts))]:
        covs = cw.generator_covectors(z)
        active = np.nonzero(np.any(covs != 0.0, axis=1)
                            & np.all(np.isfinite(covs), axis=1))[0]
        if cw.active_generator_count(z) > cw.active_generator_bound(z):
            locality_ok = False
        if len(active) >= 2:
            w2 = s.conformal_scale(z) ** 2
            sub = covs[active]
            gram = (-np.outer(sub[:, 0], sub[:, 0])
                    + np.outer(sub[:, 1], sub[:, 1])) / w2
            np.fill_diagonal(gram, -math.inf)
            cross_max = max(cross_max, float(np.max(gram)))

    return {
        "zero_max_abs": zero_max_abs,
        "positive_min": positive_min,
        "positive_samples": len(pos_pts),
        "cross_term_max": cross_max,
        "locality_ok": locality_ok,
    }


# ---------------------------------------------------------------------------
# case witnesses
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class WitnessField:
    case: str  # "equality" | "reverse" | "unrelated"
    field: ScalarField
    spacetime: Spacetime
    p: Point
    q: Point
    epsilon: float
    value_gap: float
    aux_points: dict
    offsets: dict
    parts: dict
    coverings: dict

    def delta(self) -> float:
        """f(q) - f(p)."""
        return self.field.value(self.q) - self.field.value(self.p)

    def positive_part(self) -> float:
        return max(0.0, self.delta())

    def to_dict(self) -> dict:
        return {
            "case": self.case,
            "p": list(self.p.coords),
            "q": list(self.q.coords),
            "epsilon": self.epsilon,
            "value_gap": self.value_gap,
            "aux_points": {k: list(v.coords) for k, v in self.aux_points.items()},
            "offsets": dict(self.offsets),
            "coverings": {k: cw.to_dict() for k, cw in self.coverings.items()},
        }


def _geodesic_direction(s: Spacetime, p: Point, q: Point) -> np.ndarray:
    """Unit (euclidean) direction of the maximizing geodesic from p to q, or
    pure time for null-related pairs."""
    dt = q.t - p.t
    if isinstance(s, FlatCylinder):
        dx = s.wrap_signed(q.coords[1] - p.coords[1])
    else:
        dx = q.coords[1] - p.coords[1]
    rel = classify_pair(s, p, q)
    if rel is not CausalRelation.CHRONOLOGICAL_FUTURE:
        return np.array([1.0, 0.0])
    u = np.array([dt, dx])
    return u / np.linalg.norm(u)


def _shrink_until(start: float, predicate, what: str, factor: float = 0.5) -> float:
    delta = start
    for _ in range(_MAX_HALVINGS):
        if predicate(delta):
            return delta
        delta *= factor
    raise ToolkitError(f"offset schedule for {what} did not converge from {start}")


def _window_pad(s: Spacetime, window, pad):
    if window is None:
        return None
    return (window[0] - pad, window[1] + pad)


def build_equality_witness(s: Spacetime, p: Point, q: Point, epsilon: float,
                           depth: float = 0.15,
                           window: tuple[float, float] | None = None) -> WitnessField:
    """Admissible f with f(q) - f(p) in [d(p,q), d(p,q) + epsilon) for p < q.

    Chooses the surface through q, a point p' below p on the maximizing
    geodesic (where the increment d(p',q) - d(p',p) is exactly d(p,q)), and a
    guard q' above q close enough that its past above the surface stays
    inside I+(p'); the field is covering(above) - covering(below) + d(p', .).
    """
    if epsilon <= 0:
        raise ChartDomainError("epsilon must be positive")
    rel = classify_pair(s, p, q)
    if not rel.is_future:
        raise PairNotFuture(f"{p} -> {q} is {rel.value}")
    p = Point(s.canonical(p.coords))
    q = Point(s.canonical(q.coords))
    surface = CauchySurface(q.t)
    d0 = closed_form_distance(s, p, q)
    u = _geodesic_direction(s, p, q)

    alpha = math.nan

    def p_prime_ok(delta: float) -> bool:
        nonlocal alpha
        cand = Point(s.canonical((p.t - delta * u[0], p.coords[1] - delta * u[1])))
        if classify_pair(s, cand, p) is not CausalRelation.CHRONOLOGICAL_FUTURE:
            return False
        alpha = (closed_form_distance(s, cand, q)
                 - closed_form_distance(s, cand, p) - d0)
        return alpha < epsilon

    delta_p = _shrink_until(0.1, p_prime_ok, "p'")
    p_prime = Point(s.canonical((p.t - delta_p * u[0], p.coords[1] - delta_p * u[1])))
    if alpha < -1e-9:
        raise ContractViolation(f"alpha(p') = {alpha} violates the inverse triangle")

    def q_prime_ok(delta: float) -> bool:
        # both corners of I-(q') on the surface must be inside I+(p')
        for sgn in (1.0, -1.0):
            corner = Point(s.canonical((surface.level, q.coords[1] + sgn * delta)))
            if classify_pair(s, p_prime, corner) is not CausalRelation.CHRONOLOGICAL_FUTURE:
                return False
        return True

    delta_q = _shrink_until(0.1, q_prime_ok, "q'")
    q_prime = Point(s.canonical((q.t + delta_q, q.coords[1])))

    f1 = build_covering_witness(s, surface, "above", [q], [q_prime], depth,
                                window=window)
    f2 = build_covering_witness(s, surface, "below", [p], [p_prime], depth,
                                window=window)
    d_p_prime = distance_field(s, p_prime, "from_base")
    field = combine_fields(
        f"equality_witness(eps={epsilon})",
        [(1.0, f1.field), (-1.0, f2.field), (1.0, d_p_prime)])

    value = field.value(q) - field.value(p)
    gap = value - d0
    if not (-1e-9 <= gap < epsilon):
        raise ContractViolation(
            f"equality witness increment {value} vs d={d0}: gap {gap} not in [0, {epsilon})")
    return WitnessField(
        case="equality", field=field, spacetime=s, p=p, q=q, epsilon=epsilon,
        value_gap=gap,
        aux_points={"p_prime": p_prime, "q_prime": q_prime},
        offsets={"p_prime": delta_p, "q_prime": delta_q},
        parts={"f1": f1.field, "f2": f2.field, "d_p_prime": d_p_prime},
        coverings={"f1": f1, "f2": f2})


def build_reverse_witness(s: Spacetime, p: Point, q: Point,
                          depth: float = 0.15,
                          window: tuple[float, float] | None = None) -> WitnessField:
    """Admissible f with f(q) - f(p) <= 0 (positive part exactly 0) for p > q."""
    rel = classify_pair(s, p, q)
    if not rel.is_past:
        raise PairNotPast(f"{p} -> {q} is {rel.value}")
    w = build_equality_witness(s, q, p, epsilon=1.0, depth=depth, window=window)
    value = w.field.value(Point(s.canonical(q.coords))) - w.field.value(
        Point(s.canonical(p.coords)))
    if value > 0.0:
        raise ContractViolation(f"reverse witness has positive increment {value}")
    return WitnessField(
        case="reverse", field=w.field, spacetime=s,
        p=Point(s.canonical(p.coords)), q=Point(s.canonical(q.coords)),
        epsilon=1.0, value_gap=value, aux_points=w.aux_points,
        offsets=w.offsets, parts=w.parts, coverings=w.coverings)


def build_unrelated_witness(s: Spacetime, p: Point, q: Point, epsilon: float,
                            depth: float = 0.15,
                            window: tuple[float, float] | None = None) -> WitnessField:
    """Admissible f with |f(q) - f(p)| < epsilon for causally unrelated p, q.

    Works through the surface at the later point's time; both points get a
    chronological-past anchor with d(anchor, point) < epsilon/2 and disjoint
    cone traces on the surface, so f(p) and f(q) reduce to the two anchor
    distances.
    """
    if epsilon <= 0:
        raise ChartDomainError("epsilon must be positive")
    rel = classify_pair(s, p, q)
    if rel is not CausalRelation.UNRELATED:
        raise PairNotUnrelated(f"{p} -> {q} is {rel.value}")
    p = Point(s.canonical(p.coords))
    q = Point(s.canonical(q.coords))
    a, b = (p, q) if p.t <= q.t else (q, p)  # a is weakly below the surface
    tau = b.t
    surface = CauchySurface(tau)
    rho_a = tau - a.t
    m_ab = _sep1(s, a.coords[1], b.coords[1])
    a_tilde = Point(s.canonical((tau, a.coords[1])))

    def disjoint_ok(delta: float) -> bool:
        r1 = rho_a + delta
        r2 = delta
        if isinstance(s, FlatCylinder):
            other = s.circumference - m_ab
            return r1 + r2 < m_ab and r1 + r2 < other
        return r1 + r2 < m_ab

    start = min(0.1, 0.49 * epsilon)
    try:
        delta = _shrink_until(start, disjoint_ok, "disjoint anchors")
    except ToolkitError as exc:
        raise DisjointTracesImpossible(
            f"{p}, {q} are too close to causal relation: {exc}") from exc
    a_prime = Point(s.canonical((a.t - delta, a.coords[1])))
    b_prime = Point(s.canonical((b.t - delta, b.coords[1])))

    def guard_ok(anchor: Point, center_x: float):
        def ok(dg: float) -> bool:
            for sgn in (1.0, -1.0):
                corner = Point(s.canonical((tau, center_x + sgn * dg)))
                if classify_pair(s, anchor, corner) is not CausalRelation.CHRONOLOGICAL_FUTURE:
                    return False
            return True
        return ok

    d_ga = _shrink_until(0.1, guard_ok(a_prime, a_tilde.coords[1]), "a-guard")
    d_gb = _shrink_until(0.1, guard_ok(b_prime, b.coords[1]), "b-guard")
    a_tilde_prime = Point(s.canonical((tau + d_ga, a_tilde.coords[1])))
    b_tilde_prime = Point(s.canonical((tau + d_gb, b.coords[1])))

    f1 = build_covering_witness(s, surface, "above", [a_tilde, b],
                                [a_tilde_prime, b_tilde_prime], depth, window=window)
    f2 = build_covering_witness(s, surface, "below", [a, b],
                                [a_prime, b_prime], depth, window=window)
    d_a = distance_field(s, a_prime, "from_base")
    d_b = distance_field(s, b_prime, "from_base")
    field = combine_fields(
        f"unrelated_witness(eps={epsilon})",
        [(1.0, f1.field), (-1.0, f2.field), (1.0, d_a), (1.0, d_b)])

    fa, fb = field.value(a), field.value(b)
    for label, got, want in (("a", fa, delta), ("b", fb, delta)):
        if abs(got - want) > 1e-9:
            raise ContractViolation(
                f"unrelated witness value at {label} is {got}, expected anchor "
                f"distance {want}")
    value = field.value(q) - field.value(p)
    if not abs(value) < epsilon:
        raise ContractViolation(
            f"unrelated witness |f(q)-f(p)| = {abs(value)} not below {epsilon}")
    return WitnessField(
        case="unrelated", field=field, spacetime=s, p=p, q=q, epsilon=epsilon,
        value_gap=abs(value),
        aux_points={"a_tilde": a_tilde, "a_prime": a_prime, "b_prime": b_prime,
                    "a_tilde_prime": a_tilde_prime, "b_tilde_prime": b_tilde_prime},
        offsets={"anchor": delta, "a_guard": d_ga, "b_guard": d_gb},
        parts={"f1": f1.field, "f2": f2.field, "d_a_prime": d_a, "d_b_prime": d_b},
        coverings={"f1": f1, "f2": f2})

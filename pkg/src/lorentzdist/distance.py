"""Lorentzian distance three ways: closed forms, causal-curve length, and
variational path maximization (sound lower bounds).

Curves are piecewise-linear in chart coordinates.  On the cylinder the node
coordinates are taken verbatim (no winding reduction), so a curve lives in a
definite homotopy class chosen by its nodes; the path maximizer searches the
provably relevant winding numbers explicitly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .causal import CausalRelation, classify_pair
from .errors import (ChartDomainError, ClosedFormUnavailable, NoCausalPath,
                     NonCausalSegment)
from .fields import ScalarField
from .geometry import FlatCylinder, Point, Spacetime, gauss_legendre

# proper-time lengths below this are treated as exactly null when reporting
_FEAS_SLACK = 0.0


@dataclass(frozen=True)
class Curve:
    """Ordered nodes joined by straight coordinate segments."""

    nodes: tuple[Point, ...]

    def __post_init__(self):
        if len(self.nodes) < 2:
            raise ChartDomainError("curve needs at least 2 nodes")
        for a, b in zip(self.nodes, self.nodes[1:]):
            if a.coords == b.coords:
                raise ChartDomainError("consecutive curve nodes must be distinct")

    @property
    def n_segments(self) -> int:
        return len(self.nodes) - 1


@dataclass(frozen=True)
class DistanceEstimate:
    """Two-sided estimate: path lower bound, variational upper bound."""

    lower: float
    upper: float
    closed_form: float | None = None

    @property
    def gap(self) -> float:
        return self.upper - self.lower


def curve_length(s: Spacetime, curve: Curve, quadrature_n: int = 16) -> float:
    """Proper time of an admissible causal curve (Gauss-Legendre per segment).

    Raises NonCausalSegment when any segment tangent is spacelike or
    past-directed at a quadrature sample.
    """
    total = 0.0
    nodes, _ = gauss_legendre(quadrature_n)
    lam = 0.5 * (nodes + 1.0)
    for a, b in zip(curve.nodes, curve.nodes[1:]):
        da = b.array() - a.array()
        for frac in lam:
            x = Point(tuple(a.array() + frac * da))
            ch = s.causal_character(x, s.vector(x, *da))
            if not ch.is_causal or ch.orientation.value == "past":
                raise NonCausalSegment(
                    f"segment {a} -> {b} is {ch.causal_class.value}"
                    f"/{ch.orientation.value} at {x}")
        total += s.segment_length(a, b, quadrature_n)
    return total


def winding_range(s: FlatCylinder, dt: float) -> range:
    """Winding numbers that can possibly be causal; larger ones are spacelike."""
    k_max = math.ceil(abs(dt) / s.circumference) + 1
    return range(-k_max, k_max + 1)


def closed_form_distance(s: Spacetime, p: Point, q: Point) -> float:
    """Exact distance on Minkowski/FlatCylinder; 0 unless q is chronologically
    after p; raises ClosedFormUnavailable elsewhere."""
    if not s.has_closed_form:
        raise ClosedFormUnavailable(f"{s.kind} has no closed-form distance")
    p = Point(s.canonical(p.coords))
    q = Point(s.canonical(q.coords))
    dt = q.t - p.t
    if dt <= 0:
        return 0.0
    if isinstance(s, FlatCylinder):
        dtheta = q.coords[1] - p.coords[1]
        best = 0.0
        for k in winding_range(s, dt):
            rad = dt * dt - (dtheta + k * s.circumference) ** 2
            best = max(best, rad)
        return math.sqrt(best)
    sep = s.spatial_separation(p, q)
    rad = dt * dt - sep * sep
    return math.sqrt(rad) if rad > 0 else 0.0


# ---------------------------------------------------------------------------
# path maximization
# ---------------------------------------------------------------------------


def _feasible(delta: np.ndarray) -> bool:
    """Segment tangent is future-directed causal (flat cone test)."""
    dt = delta[0]
    return dt >= 0 and dt * dt >= float(np.dot(delta[1:], delta[1:]))


def _all_feasible(nodes: np.ndarray) -> bool:
    deltas = np.diff(nodes, axis=0)
    dts = deltas[:, 0]
    return bool(np.all(dts >= 0) and
                np.all(dts ** 2 >= np.sum(deltas[:, 1:] ** 2, axis=1)))


def _segment_len(s: Spacetime, a: np.ndarray, b: np.ndarray, quad_n: int) -> float:
    delta = b - a
    rad = delta[0] ** 2 - float(np.dot(delta[1:], delta[1:]))
    if rad <= 0:
        return 0.0
    return s._segment_scale(a, delta, quad_n) * math.sqrt(rad)


def _polyline_length(s: Spacetime, nodes: np.ndarray, quad_n: int) -> float:
    return sum(_segment_len(s, nodes[i], nodes[i + 1], quad_n)
               for i in range(len(nodes) - 1))


def _ascend(s: Spacetime, nodes: np.ndarray, quad_n: int,
            max_sweeps: int = 60) -> float:
    """Projected coordinate ascent over interior nodes; returns best length.

    Candidate moves that leave the cone are bisected back toward the current
    feasible position; a sweep with no accepted move halves the step.
    """
    n = len(nodes) - 1
    dim = nodes.shape[1]
    step = 0.25 * max(nodes[-1][0] - nodes[0][0], 1e-6) / n
    seg = [_segment_len(s, nodes[i], nodes[i + 1], quad_n) for i in range(n)]
    for _ in range(max_sweeps):
        improved = False
        for i in range(1, n):
            for axis in range(dim):
                base_pair = seg[i - 1] + seg[i]
                best_gain, best_z = 0.0, None
                for sign in (1.0, -1.0):
                    z = nodes[i].copy()
                    z[axis] += sign * step
                    for _ in range(8):  # nudge back inside the cone
                        if _feasible(z - nodes[i - 1]) and _feasible(nodes[i + 1] - z):
                            break
                        z = 0.5 * (z + nodes[i])
                    else:
                        continue
                    cand = (_segment_len(s, nodes[i - 1], z, quad_n)
                            + _segment_len(s, z, nodes[i + 1], quad_n))
                    if cand - base_pair > best_gain + 1e-15:
                        best_gain, best_z = cand - base_pair, z
                if best_z is not None:
                    nodes[i] = best_z
                    seg[i - 1] = _segment_len(s, nodes[i - 1], nodes[i], quad_n)
                    seg[i] = _segment_len(s, nodes[i], nodes[i + 1], quad_n)
                    improved = True
        if not improved:
            step *= 0.5
            if step < 1e-9:
                break
    return sum(seg)


def _initial_nodes(start: np.ndarray, end: np.ndarray, n_segments: int,
                   rng: np.random.Generator | None) -> np.ndarray:
    lam = np.linspace(0.0, 1.0, n_segments + 1)[:, None]
    nodes = start[None, :] + lam * (end - start)[None, :]
    if rng is None:
        return nodes
    jitter = rng.normal(0.0, 1.0, size=nodes.shape)
    jitter[0] = jitter[-1] = 0.0
    scale = 0.25 * (end[0] - start[0]) / n_segments
    # shrink the jitter until the whole polyline is causal; the straight
    # chord is strictly feasible so this terminates
    lam_j = 1.0
    for _ in range(60):
        cand = nodes + lam_j * scale * jitter
        if _all_feasible(cand):
            return cand
        lam_j *= 0.5
    return nodes


def max_path_distance(s: Spacetime, p: Point, q: Point, n_segments: int = 8,
                      restarts: int = 20, seed: int = 0,
                      quadrature_n: int = 16) -> float:
    """Best proper time over piecewise-linear causal curves from p to q.

    Every evaluated curve is feasible, so the result is a valid lower bound
    for the distance.  Restart r draws its jitter from a stream derived from
    (seed, r); the returned best-so-far is monotone in `restarts`.
    """
    rel = classify_pair(s, p, q)
    if rel is CausalRelation.EQUAL:
        return 0.0
    if rel is CausalRelation.NULL_BOUNDARY_FUTURE:
        return 0.0  # only degenerate (null) causal curves exist
    if not rel.is_future:
        raise NoCausalPath(f"relation {rel.value} admits no future causal path")

    p = Point(s.canonical(p.coords))
    q = Point(s.canonical(q.coords))
    start = p.array()
    dt = q.t - p.t

    targets = []
    if isinstance(s, FlatCylinder):
        dtheta = q.coords[1] - p.coords[1]
        for k in winding_range(s, dt):
            d = dtheta + k * s.circumference
            if dt * dt > d * d:  # spacelike windings are provably excluded
                targets.append(np.array([q.t, p.coords[1] + d]))
    else:
        targets.append(q.array())

    best = 0.0
    for end in targets:
        for r in range(restarts):
            rng = None if r == 0 else np.random.default_rng([seed, r])
            nodes = _initial_nodes(start, end, n_segments, rng)
            best = max(best, _ascend(s, nodes, quadrature_n))
    return best


# ---------------------------------------------------------------------------
# distance fields d(base, .) and d(., base)
# ---------------------------------------------------------------------------


def distance_field(s: Spacetime, base: Point, direction: str = "from_base") -> ScalarField:
    """The field z -> d(base, z) ("from_base") or z -> d(z, base) ("to_base").

    Analytic gradient where defined; the seam margin marks the null cone of
    the base point and, on the cylinder, the winding tie set (the cut locus).
    """
    if not s.has_closed_form:
        raise ClosedFormUnavailable(f"{s.kind} has no closed-form distance field")
    if direction not in ("from_base", "to_base"):
        raise ChartDomainError(f"direction must be from_base/to_base, got {direction}")
    sign = 1.0 if direction == "from_base" else -1.0
    base = Point(s.canonical(base.coords))
    b = base.array()
    cylinder = isinstance(s, FlatCylinder)
    half = s.circumference / 2.0 if cylinder else math.inf

    def _split(coords: np.ndarray):
        """Time gap toward the field's causal side and minimal displacement."""
        dt = sign * (coords[:, 0] - b[0])
        dx = coords[:, 1:] - b[1:]
        if cylinder:
            dx = s.wrap_signed_batch(dx)
        sep = np.sqrt(np.sum(dx * dx, axis=1))
        return dt, dx, sep

    def batch_evaluator(coords: np.ndarray) -> np.ndarray:
        dt, _, sep = _split(np.asarray(coords, dtype=float))
        rad = dt * dt - sep * sep
        return np.sqrt(np.where((dt > 0) & (rad > 0), rad, 0.0))

    def batch_covector(coords: np.ndarray) -> np.ndarray:
        coords = np.asarray(coords, dtype=float)
        dt, dx, sep = _split(coords)
        rad = dt * dt - sep * sep
        inside = (dt > 0) & (rad > 0)
        d = np.sqrt(np.where(inside, rad, 1.0))
        out = np.zeros_like(coords)
        out[inside, 0] = sign * dt[inside] / d[inside]
        out[inside, 1:] = -dx[inside] / d[inside, None]
        on_seam = np.abs(dt - sep) == 0.0
        if cylinder:
            on_seam |= inside & (sep == half)
        out[on_seam] = np.nan
        return out

    def batch_margin(coords: np.ndarray) -> np.ndarray:
        dt, _, sep = _split(np.asarray(coords, dtype=float))
        margin = np.abs(dt - sep)
        if cylinder:
            margin = np.minimum(margin, half - sep)
        return margin

    def evaluator(x: Point) -> float:
        return float(batch_evaluator(x.array()[None, :])[0])

    def covector_rule(x: Point) -> np.ndarray:
        return batch_covector(x.array()[None, :])[0]

    def seam_margin(x: Point) -> float:
        return float(batch_margin(x.array()[None, :])[0])

    return ScalarField(
        name=f"d({direction}={base.coords})",
        dim=s.dim,
        evaluator=evaluator,
        covector_rule=covector_rule,
        seam_margin=seam_margin,
        batch_evaluator=batch_evaluator,
        batch_covector=batch_covector,
        batch_margin=batch_margin,
        lipschitz_bound=None,  # d is not Lipschitz near the cone
    )

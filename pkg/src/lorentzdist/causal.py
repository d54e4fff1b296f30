"""Exact causal relations and Cauchy-surface predicates on the catalog.

All catalog metrics are conformally flat, so the causal cone test reduces to
comparing the time gap against the effective spatial displacement (with
winding minimization on the cylinder).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import ToolkitError
from .geometry import (TOL_NULL, ConformallyFlat, FlatCylinder, Point,
                       Spacetime, gauss_legendre)


class CausalRelation(Enum):
    EQUAL = "equal"
    CHRONOLOGICAL_FUTURE = "chronological_future"
    NULL_BOUNDARY_FUTURE = "null_boundary_future"
    CHRONOLOGICAL_PAST = "chronological_past"
    NULL_BOUNDARY_PAST = "null_boundary_past"
    UNRELATED = "unrelated"

    @property
    def is_future(self) -> bool:
        """q lies in the causal future of p (strict)."""
        return self in (CausalRelation.CHRONOLOGICAL_FUTURE,
                        CausalRelation.NULL_BOUNDARY_FUTURE)

    @property
    def is_past(self) -> bool:
        return self in (CausalRelation.CHRONOLOGICAL_PAST,
                        CausalRelation.NULL_BOUNDARY_PAST)

    @property
    def is_chronological(self) -> bool:
        return self in (CausalRelation.CHRONOLOGICAL_FUTURE,
                        CausalRelation.CHRONOLOGICAL_PAST)


class SurfaceSide(Enum):
    PAST_OF_SURFACE = "past_of_surface"
    ON_SURFACE = "on_surface"
    FUTURE_OF_SURFACE = "future_of_surface"


@dataclass(frozen=True)
class CauchySurface:
    """Level set S = {t = level}; spacelike Cauchy surface in every catalog entry."""

    level: float


def classify_pair(s: Spacetime, p: Point, q: Point,
                  tol_null: float = TOL_NULL) -> CausalRelation:
    """Causal relation of the ordered pair (p, q).

    Future-type iff a future-directed causal curve runs from p to q; the
    null boundary is detected with a scale-relative tol_null band.
    """
    p = Point(s.canonical(p.coords))
    q = Point(s.canonical(q.coords))
    if p.coords == q.coords:
        return CausalRelation.EQUAL
    dt = q.t - p.t
    sep = s.spatial_separation(p, q)
    scale = max(1.0, abs(dt), sep)
    if abs(abs(dt) - sep) <= tol_null * scale:
        return (CausalRelation.NULL_BOUNDARY_FUTURE if dt > 0
                else CausalRelation.NULL_BOUNDARY_PAST)
    if dt > sep:
        return CausalRelation.CHRONOLOGICAL_FUTURE
    if -dt > sep:
        return CausalRelation.CHRONOLOGICAL_PAST
    return CausalRelation.UNRELATED


def surface_relation(s: Spacetime, x: Point, surface: CauchySurface) -> SurfaceSide:
    """Position of x relative to J-(S) / S / J+(S); sign of x.t - level."""
    if x.t > surface.level:
        return SurfaceSide.FUTURE_OF_SURFACE
    if x.t < surface.level:
        return SurfaceSide.PAST_OF_SURFACE
    return SurfaceSide.ON_SURFACE


def cone_trace_diameter(s: Spacetime, p: Point, surface: CauchySurface,
                        quadrature_n: int = 64) -> float:
    """Diameter of the future cone's trace on S in the induced metric.

    The trace of I+(p) on S is the coordinate ball of radius (level - p.t)
    about p's spatial position; the induced metric weights it by the
    conformal factor restricted to S (quadrature for non-constant factors).
    """
    if surface_relation(s, p, surface) is not SurfaceSide.PAST_OF_SURFACE:
        raise ToolkitError(f"point {p} is not strictly below surface t={surface.level}")
    r = surface.level - p.t
    if isinstance(s, FlatCylinder):
        return min(2.0 * r, s.circumference)
    if isinstance(s, ConformallyFlat):
        nodes, weights = gauss_legendre(quadrature_n)
        x0 = p.coords[1]
        xs = x0 + r * nodes  # maps [-1,1] onto the trace interval
        omega = s.factor.fn(np.full_like(xs, surface.level), xs)
        return float(r * np.sum(weights * omega))
    return 2.0 * r


def in_causal_future(s: Spacetime, p: Point, z: Point) -> bool:
    """z in J+(p) (causal future, including the boundary and p itself)."""
    rel = classify_pair(s, p, z)
    return rel.is_future or rel is CausalRelation.EQUAL


def in_chronological_future(s: Spacetime, p: Point, z: Point) -> bool:
    """z in I+(p) (open chronological future)."""
    return classify_pair(s, p, z) is CausalRelation.CHRONOLOGICAL_FUTURE


def in_chronological_past(s: Spacetime, p: Point, z: Point) -> bool:
    """z in I-(p)."""
    return classify_pair(s, p, z) is CausalRelation.CHRONOLOGICAL_PAST

"""Catalog spacetimes with signature (-,+,...,+) and exactly known causal structure.

Every catalog metric is a conformal rescaling of the flat metric, g = w(x)^2 * eta,
which is what makes exact causal predicates and closed-form distances possible.
The base class doubles as the user-extensible metric interface, but all toolkit
guarantees are stated for the catalog entries only.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from functools import lru_cache
from typing import Callable

import numpy as np

from .errors import BasePointMismatch, ChartDomainError

# Null-boundary classification threshold, relative to the metric scale of the
# vector (exact zero of g(v,v) is measure-zero in floating point).
TOL_NULL = 1e-10


@lru_cache(maxsize=None)
def gauss_legendre(n: int):
    """Cached quadrature nodes/weights on [-1, 1]; callers must not mutate."""
    return np.polynomial.legendre.leggauss(n)


@dataclass(frozen=True)
class Point:
    """Chart coordinates (t, x1, ...) with t the global time function."""

    coords: tuple[float, ...]

    def __post_init__(self):
        # keep coords as plain floats so reports serialize cleanly
        object.__setattr__(self, "coords", tuple(float(c) for c in self.coords))

    @property
    def t(self) -> float:
        return self.coords[0]

    @property
    def spatial(self) -> tuple[float, ...]:
        return self.coords[1:]

    @property
    def dim(self) -> int:
        return len(self.coords)

    def array(self) -> np.ndarray:
        return np.asarray(self.coords, dtype=float)

    def __repr__(self) -> str:
        return "Point" + repr(self.coords)


@dataclass(frozen=True)
class TangentVector:
    """Coordinate components of a vector attached at a base point."""

    base: Point
    components: tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "components",
                           tuple(float(c) for c in self.components))

    @property
    def dim(self) -> int:
        return len(self.components)

    def array(self) -> np.ndarray:
        return np.asarray(self.components, dtype=float)

    def scaled(self, factor: float) -> "TangentVector":
        return TangentVector(self.base, tuple(factor * c for c in self.components))


class CausalClass(Enum):
    TIMELIKE = "timelike"
    NULL = "null"
    SPACELIKE = "spacelike"
    ZERO = "zero"


class Orientation(Enum):
    FUTURE = "future"
    PAST = "past"
    NONE = "none"


@dataclass(frozen=True)
class CausalCharacter:
    """Sign class of g(v,v) together with the time orientation of v."""

    causal_class: CausalClass
    orientation: Orientation

    @property
    def is_causal(self) -> bool:
        return self.causal_class in (CausalClass.TIMELIKE, CausalClass.NULL)

    @property
    def is_timelike(self) -> bool:
        return self.causal_class is CausalClass.TIMELIKE


def _check_finite(coords) -> tuple[float, ...]:
    out = tuple(float(c) for c in coords)
    if not all(math.isfinite(c) for c in out):
        raise ChartDomainError(f"non-finite coordinates {out}")
    return out


class Spacetime:
    """Metric interface: a chart, metric components, and causal helpers.

    Subclasses must provide ``dim``, ``kind`` and ``conformal_scale``; every
    catalog metric is conformal_scale(x)^2 times the flat metric eta.
    """

    dim: int
    kind: str
    has_closed_form: bool = False

    # -- chart ------------------------------------------------------------

    def point(self, *coords: float) -> Point:
        if len(coords) != self.dim:
            raise ChartDomainError(
                f"{self.kind} expects {self.dim} coordinates, got {len(coords)}"
            )
        return Point(self.canonical(_check_finite(coords)))

    def canonical(self, coords: tuple[float, ...]) -> tuple[float, ...]:
        """Reduce coordinates to the canonical chart representative."""
        return coords

    def vector(self, base: Point, *components: float) -> TangentVector:
        if len(components) != self.dim:
            raise ChartDomainError(
                f"{self.kind} expects {self.dim} components, got {len(components)}"
            )
        return TangentVector(base, _check_finite(components))

    # -- metric -----------------------------------------------------------

    def conformal_scale(self, x: Point) -> float:
        raise NotImplementedError

    def conformal_scale_batch(self, coords: np.ndarray) -> np.ndarray:
        return np.array([self.conformal_scale(Point(tuple(c))) for c in coords])

    def metric_components(self, x: Point) -> np.ndarray:
        """Symmetric metric matrix g_{mu nu}(x)."""
        _check_finite(x.coords)
        eta = np.diag([-1.0] + [1.0] * (self.dim - 1))
        return self.conformal_scale(x) ** 2 * eta

    def inner(self, x: Point, v: TangentVector, w: TangentVector) -> float:
        """Metric pairing g_x(v, w); both vectors must live at x."""
        if v.base != x or w.base != x:
            raise BasePointMismatch(
                f"vectors based at {v.base}, {w.base}; expected {x}"
            )
        g = self.metric_components(x)
        return float(v.array() @ g @ w.array())

    def raise_gradient(self, x: Point, df) -> TangentVector:
        """Metric gradient: components v^mu = g^{mu nu}(x) df_nu."""
        g = self.metric_components(x)
        v = np.linalg.solve(g, np.asarray(df, dtype=float))
        return TangentVector(x, tuple(v))

    def causal_character(
        self, x: Point, v: TangentVector, tol_null: float = TOL_NULL
    ) -> CausalCharacter:
        """Classify v from the sign of g(v,v), with a scale-relative null band."""
        g = self.metric_components(x)
        arr = v.array()
        norm2 = float(arr @ g @ arr)
        scale = float(np.abs(arr) @ np.abs(g) @ np.abs(arr))
        if scale == 0.0:
            return CausalCharacter(CausalClass.ZERO, Orientation.NONE)
        if abs(norm2) <= tol_null * scale:
            cls = CausalClass.NULL
        elif norm2 < 0.0:
            cls = CausalClass.TIMELIKE
        else:
            return CausalCharacter(CausalClass.SPACELIKE, Orientation.NONE)
        # catalog charts have globally future-pointing d/dt
        orient = Orientation.FUTURE if arr[0] > 0 else Orientation.PAST
        if arr[0] == 0.0:
            orient = Orientation.NONE
        return CausalCharacter(cls, orient)

    # -- causal structure hooks (flat up to conformal factor) -------------

    def spatial_separation(self, p: Point, q: Point) -> float:
        """Effective spatial displacement entering the causal cone test."""
        d = np.asarray(q.spatial) - np.asarray(p.spatial)
        return float(np.linalg.norm(d))

    def segment_length(self, a: Point, b: Point, quadrature_n: int = 16) -> float:
        """Proper time of the straight coordinate segment a -> b.

        Raw coordinate differences are used (no winding reduction); the caller
        controls the homotopy class through the node coordinates.
        """
        da = b.array() - a.array()
        rad = da[0] ** 2 - float(np.dot(da[1:], da[1:]))
        rad = max(rad, 0.0)
        return self._segment_scale(a.array(), da, quadrature_n) * math.sqrt(rad)

    def _segment_scale(self, start: np.ndarray, delta: np.ndarray, n: int) -> float:
        """Path-averaged conformal scale along the segment (1 for flat entries)."""
        nodes, weights = gauss_legendre(n)
        lam = 0.5 * (nodes + 1.0)
        pts = start[None, :] + lam[:, None] * delta[None, :]
        return float(0.5 * np.sum(weights * self.conformal_scale_batch(pts)))

    def eikonal_batch(self, coords: np.ndarray, covectors: np.ndarray):
        """Vectorized g(grad f, grad f) and past-causal flags from covectors.

        For g = w^2 eta the raised gradient is eta*df/w^2, so
        g(grad f, grad f) = (-df_t^2 + |df_x|^2)/w^2 and grad f is past
        directed exactly when df_t > 0.  NaN covector rows yield NaN values
        and False flags.
        """
        w2 = self.conformal_scale_batch(coords) ** 2
        vals = (-covectors[:, 0] ** 2 + np.sum(covectors[:, 1:] ** 2, axis=1)) / w2
        with np.errstate(invalid="ignore"):
            scale = np.sum(np.abs(covectors) ** 2, axis=1) / w2
            past = (vals <= TOL_NULL * scale) & (covectors[:, 0] > 0)
        past = past & np.isfinite(vals)
        return vals, past

    def spec(self) -> dict:
        """Config-schema description of this spacetime."""
        raise NotImplementedError

    def __repr__(self) -> str:
        return f"{type(self).__name__}({self.spec()})"


class Minkowski(Spacetime):
    """Flat spacetime in inertial coordinates, dim 2 to 4."""

    has_closed_form = True
    kind = "minkowski"

    def __init__(self, dim: int = 2):
        if dim not in (2, 3, 4):
            raise ChartDomainError(f"minkowski dim must be 2..4, got {dim}")
        self.dim = dim

    def conformal_scale(self, x: Point) -> float:
        return 1.0

    def conformal_scale_batch(self, coords: np.ndarray) -> np.ndarray:
        return np.ones(len(coords))

    def _segment_scale(self, start, delta, n) -> float:
        return 1.0

    def spec(self) -> dict:
        return {"kind": self.kind, "dim": self.dim}


class FlatCylinder(Spacetime):
    """Flat 1+1 quotient with periodic spatial coordinate of given circumference."""

    has_closed_form = True
    kind = "flat_cylinder"
    dim = 2

    def __init__(self, circumference: float = 2.0 * math.pi):
        if not (circumference > 0 and math.isfinite(circumference)):
            raise ChartDomainError(f"circumference must be positive, got {circumference}")
        self.circumference = float(circumference)

    def canonical(self, coords: tuple[float, ...]) -> tuple[float, ...]:
        theta = coords[1] % self.circumference
        if theta == self.circumference:  # guard fp wrap
            theta = 0.0
        return (coords[0], theta)

    def conformal_scale(self, x: Point) -> float:
        return 1.0

    def conformal_scale_batch(self, coords: np.ndarray) -> np.ndarray:
        return np.ones(len(coords))

    def _segment_scale(self, start, delta, n) -> float:
        return 1.0

    def wrap_signed(self, dtheta: float) -> float:
        """Minimal-winding signed representative in (-C/2, C/2]."""
        c = self.circumference
        r = dtheta % c
        return r - c if r > c / 2 else r

    def wrap_signed_batch(self, dtheta: np.ndarray) -> np.ndarray:
        c = self.circumference
        r = np.mod(dtheta, c)
        return np.where(r > c / 2, r - c, r)

    def spatial_separation(self, p: Point, q: Point) -> float:
        return abs(self.wrap_signed(q.coords[1] - p.coords[1]))

    def spec(self) -> dict:
        return {"kind": self.kind, "circumference": self.circumference}


@dataclass(frozen=True)
class ConformalFactor:
    """Named positive factor w(t, x); callables accept numpy arrays."""

    name: str
    params: tuple[tuple[str, float], ...]
    fn: Callable


def conformal_factor(name: str, **params: float) -> ConformalFactor:
    """Catalog of smooth positive conformal factors (dim-2 charts)."""
    if name == "unit":
        return ConformalFactor("unit", (), lambda t, x: np.ones_like(np.asarray(t, dtype=float)))
    if name == "constant":
        value = float(params.get("value", 2.0))
        if value <= 0:
            raise ChartDomainError("constant factor must be positive")
        return ConformalFactor(
            "constant", (("value", value),
            ), lambda t, x: value * np.ones_like(np.asarray(t, dtype=float)))
    if name == "time_quadratic":
        scale = float(params.get("scale", 10.0))
        return ConformalFactor(
            "time_quadratic", (("scale", scale),),
            lambda t, x: 1.0 + np.asarray(t, dtype=float) ** 2 / scale)
    if name == "space_cosine":
        amplitude = float(params.get("amplitude", 0.1))
        if not 0 <= amplitude < 1:
            raise ChartDomainError("space_cosine amplitude must be in [0, 1)")
        return ConformalFactor(
            "space_cosine", (("amplitude", amplitude),),
            lambda t, x: 1.0 + amplitude * np.cos(np.asarray(x, dtype=float)))
    raise ChartDomainError(f"unknown conformal factor {name!r}")


class ConformallyFlat(Spacetime):
    """dim-2 metric w(t,x)^2 * eta; same causal cones as Minkowski, no closed form."""

    has_closed_form = False
    kind = "conformally_flat"
    dim = 2

    def __init__(self, factor: ConformalFactor):
        self.factor = factor

    def conformal_scale(self, x: Point) -> float:
        return float(self.factor.fn(x.coords[0], x.coords[1]))

    def conformal_scale_batch(self, coords: np.ndarray) -> np.ndarray:
        return np.asarray(self.factor.fn(coords[:, 0], coords[:, 1]), dtype=float)

    def spec(self) -> dict:
        return {"kind": self.kind, "factor": self.factor.name,
                **{k: v for k, v in self.factor.params}}


def spacetime_from_spec(spec: dict) -> Spacetime:
    """Build a catalog spacetime from its config-schema description."""
    spec = dict(spec)
    kind = spec.pop("kind", None)
    if kind == "minkowski":
        dim = int(spec.pop("dim", 2))
        _no_extra(spec, kind)
        return Minkowski(dim)
    if kind == "flat_cylinder":
        circumference = float(spec.pop("circumference", 2.0 * math.pi))
        _no_extra(spec, kind)
        return FlatCylinder(circumference)
    if kind == "conformally_flat":
        name = spec.pop("factor", "unit")
        return ConformallyFlat(conformal_factor(name, **spec))
    raise ChartDomainError(f"unknown spacetime kind {kind!r}")


def _no_extra(spec: dict, kind) -> None:
    if spec:
        raise ChartDomainError(f"unknown keys for {kind}: {sorted(spec)}")

"""Scalar fields with evaluation, gradient rules, and sampling grids.

A field carries either an analytic covector rule or a central-difference
step; batch callables are optional fast paths used by grid checks.  The
seam margin is an analytic lower bound on the coordinate distance to the
field's declared non-differentiability set (null cones, winding ties,
region seams); margin <= 0 marks the set itself.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Callable

import numpy as np

from .errors import ChartDomainError, UndefinedPoint
from .geometry import Point

Evaluator = Callable[[Point], float]
CovectorRule = Callable[[Point], np.ndarray]
MarginRule = Callable[[Point], float]
BatchFn = Callable[[np.ndarray], np.ndarray]


@dataclass(frozen=True)
class ScalarField:
    name: str
    dim: int
    evaluator: Evaluator
    covector_rule: CovectorRule | None = None
    fd_step: float | None = None
    seam_margin: MarginRule | None = None
    batch_evaluator: BatchFn | None = None
    batch_covector: BatchFn | None = None
    batch_margin: BatchFn | None = None
    lipschitz_bound: float | None = None

    @property
    def gradient_mode(self) -> str:
        if self.covector_rule is not None and self.fd_step is None:
            return "analytic"
        return f"central_difference(h={self.fd_step})"

    def value(self, x: Point) -> float:
        return float(self.evaluator(x))

    def values(self, coords: np.ndarray) -> np.ndarray:
        if self.batch_evaluator is not None:
            return np.asarray(self.batch_evaluator(coords), dtype=float)
        return np.array([self.evaluator(Point(tuple(c))) for c in coords])

    def margin(self, x: Point) -> float:
        if self.seam_margin is None:
            return math.inf
        return float(self.seam_margin(x))

    def margins(self, coords: np.ndarray) -> np.ndarray:
        if self.seam_margin is None:
            return np.full(len(coords), np.inf)
        if self.batch_margin is not None:
            return np.asarray(self.batch_margin(coords), dtype=float)
        return np.array([self.seam_margin(Point(tuple(c))) for c in coords])

    def covector(self, x: Point) -> np.ndarray:
        """Coordinate differential df at x.

        Raises UndefinedPoint on the declared seam set (margin <= 0) in
        analytic mode; central differences are computed regardless, which is
        exactly what the finite-difference seam studies rely on.
        """
        if self.fd_step is None and self.covector_rule is not None:
            if self.margin(x) <= 0.0:
                raise UndefinedPoint(f"{self.name}: gradient undefined at {x}")
            return np.asarray(self.covector_rule(x), dtype=float)
        if self.fd_step is None:
            raise UndefinedPoint(f"{self.name}: no gradient rule")
        return self._fd_covector(x)

    def covectors(self, coords: np.ndarray) -> np.ndarray:
        """Batch covectors, NaN rows where the analytic rule is undefined."""
        if self.fd_step is not None:
            return self._fd_covectors(coords)
        if self.batch_covector is not None:
            return np.asarray(self.batch_covector(coords), dtype=float)
        out = np.empty_like(coords, dtype=float)
        for i, c in enumerate(coords):
            try:
                out[i] = self.covector(Point(tuple(c)))
            except UndefinedPoint:
                out[i] = np.nan
        return out

    def _fd_covector(self, x: Point) -> np.ndarray:
        return self._fd_covectors(np.asarray(x.coords, dtype=float)[None, :])[0]

    def _fd_covectors(self, coords: np.ndarray) -> np.ndarray:
        h = self.fd_step
        out = np.empty_like(coords, dtype=float)
        for axis in range(coords.shape[1]):
            shift = np.zeros(coords.shape[1])
            shift[axis] = h
            out[:, axis] = (self.values(coords + shift) - self.values(coords - shift)) / (2 * h)
        return out

    def with_fd(self, h: float) -> "ScalarField":
        """Same field with gradients switched to central differences."""
        if h <= 0:
            raise ChartDomainError("fd step must be positive")
        return replace(self, fd_step=float(h))

    def with_analytic(self) -> "ScalarField":
        if self.covector_rule is None:
            raise ChartDomainError(f"{self.name} has no analytic gradient rule")
        return replace(self, fd_step=None)


@dataclass(frozen=True)
class GridSpec:
    """Rectangular sampling grid with exclusion radius around declared seams."""

    box: tuple[tuple[float, float], ...]
    resolution: tuple[int, ...]
    exclusion_radius: float = 0.0

    def __post_init__(self):
        if len(self.box) != len(self.resolution):
            raise ChartDomainError("box and resolution rank mismatch")
        if any(r < 2 for r in self.resolution):
            raise ChartDomainError("resolution must be >= 2 per axis")
        if any(not (lo < hi) for lo, hi in self.box):
            raise ChartDomainError("box must be nonempty per axis")
        if self.exclusion_radius < 0:
            raise ChartDomainError("exclusion_radius must be >= 0")

    @property
    def dim(self) -> int:
        return len(self.box)

    def axes(self) -> list[np.ndarray]:
        return [np.linspace(lo, hi, n) for (lo, hi), n in zip(self.box, self.resolution)]

    def points(self) -> np.ndarray:
        mesh = np.meshgrid(*self.axes(), indexing="ij")
        return np.stack([m.ravel() for m in mesh], axis=-1)

    def spacing(self) -> float:
        return min((hi - lo) / (n - 1) for (lo, hi), n in zip(self.box, self.resolution))

    def refined(self, factor: int = 2) -> "GridSpec":
        """Doubled resolution (nested grid: n -> factor*(n-1)+1)."""
        return replace(self, resolution=tuple(factor * (n - 1) + 1 for n in self.resolution))


def affine_time_field(dim: int, rate: float = 1.0, offset: float = 0.0) -> ScalarField:
    """f = rate*t + offset; the simplest admissible family (rate >= conformal sup)."""
    cov = np.zeros(dim)
    cov[0] = rate
    return ScalarField(
        name=f"affine_time(rate={rate}, offset={offset})",
        dim=dim,
        evaluator=lambda x: rate * x.coords[0] + offset,
        covector_rule=lambda x: cov.copy(),
        batch_evaluator=lambda coords: rate * coords[:, 0] + offset,
        batch_covector=lambda coords: np.tile(cov, (len(coords), 1)),
        lipschitz_bound=abs(rate),
    )


def combine_fields(name: str, terms: list[tuple[float, ScalarField]]) -> ScalarField:
    """Signed sum of fields; seam margin is the min over the parts' margins.

    Support regions are not intersected: a part being locally constant is
    fine, the other parts supply the gradient there.
    """
    if not terms:
        raise ChartDomainError("empty combination")
    dim = terms[0][1].dim
    if any(f.dim != dim for _, f in terms):
        raise ChartDomainError("mixed-dimension combination")

    def evaluator(x: Point) -> float:
        return sum(c * f.value(x) for c, f in terms)

    def covector_rule(x: Point) -> np.ndarray:
        return sum(c * f.covector(x) for c, f in terms)

    def seam_margin(x: Point) -> float:
        return min(f.margin(x) for _, f in terms)

    batch_eval = None
    if all(f.batch_evaluator is not None for _, f in terms):
        def batch_eval(coords):
            return sum(c * f.values(coords) for c, f in terms)

    batch_cov = None
    if all(f.batch_covector is not None for _, f in terms):
        def batch_cov(coords):
            return sum(c * f.covectors(coords) for c, f in terms)

    batch_marg = None
    if all(f.batch_margin is not None or f.seam_margin is None for _, f in terms):
        def batch_marg(coords):
            return np.min(np.stack([f.margins(coords) for _, f in terms]), axis=0)

    lip = None
    if all(f.lipschitz_bound is not None for _, f in terms):
        lip = sum(abs(c) * f.lipschitz_bound for c, f in terms)

    return ScalarField(
        name=name, dim=dim, evaluator=evaluator, covector_rule=covector_rule,
        seam_margin=seam_margin, batch_evaluator=batch_eval,
        batch_covector=batch_cov, batch_margin=batch_marg, lipschitz_bound=lip,
    )


def support_restricted(field: ScalarField, support_margin: MarginRule,
                       batch_support: BatchFn | None = None) -> ScalarField:
    """Field with its margin zeroed outside a declared support region.

    Used when a field's guarantees only cover {f > 0}: grid checks then
    exclude the complement instead of counting it as violations.
    """
    def seam_margin(x: Point) -> float:
        return min(field.margin(x), float(support_margin(x)))

    batch_marg = None
    if batch_support is not None:
        def batch_marg(coords):
            return np.minimum(field.margins(coords), batch_support(coords))

    return replace(field, seam_margin=seam_margin, batch_margin=batch_marg,
                   name=f"{field.name}|support")

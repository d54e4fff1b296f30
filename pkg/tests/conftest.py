import numpy as np
import pytest

from lorentzdist import (ConformallyFlat, FlatCylinder, Minkowski,
                         conformal_factor)


def make_spacetime(name):
    if name == "minkowski2":
        return Minkowski(2)
    if name == "minkowski3":
        return Minkowski(3)
    if name == "minkowski4":
        return Minkowski(4)
    if name == "cylinder":
        return FlatCylinder()
    if name == "conformal":
        return ConformallyFlat(conformal_factor("time_quadratic"))
    raise ValueError(name)


CATALOG = ["minkowski2", "minkowski3", "minkowski4", "cylinder", "conformal"]
CLOSED_FORM = ["minkowski2", "minkowski3", "minkowski4", "cylinder"]


@pytest.fixture(params=CATALOG)
def spacetime(request):
    return make_spacetime(request.param)


@pytest.fixture(params=CLOSED_FORM)
def closed_form_spacetime(request):
    return make_spacetime(request.param)


@pytest.fixture
def mink2():
    return Minkowski(2)


@pytest.fixture
def cyl():
    return FlatCylinder()


@pytest.fixture
def rng():
    return np.random.default_rng(20260810)


def random_point(s, rng, t_range=(-3.0, 3.0)):
    t = rng.uniform(*t_range)
    if isinstance(s, FlatCylinder):
        return s.point(t, rng.uniform(0.0, s.circumference))
    return s.point(t, *rng.uniform(-3.0, 3.0, size=s.dim - 1))


def chrono_step(s, rng, p, scale=1.0):
    """A point strictly inside I+(p)."""
    dt = rng.uniform(0.1, 0.1 + scale)
    direction = rng.normal(size=s.dim - 1)
    norm = np.linalg.norm(direction)
    direction = direction / norm if norm > 0 else np.zeros(s.dim - 1)
    dx = rng.uniform(0.0, 0.9) * dt * direction
    if isinstance(s, FlatCylinder):
        dx = np.clip(dx, -0.45 * s.circumference, 0.45 * s.circumference)
    return s.point(p.t + dt, *(np.asarray(p.spatial) + dx))

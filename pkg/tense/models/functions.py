"""
Analytic test functions with partial discontinuities.

``smooth`` is the toy-1 function without its jump term and serves as a
calibration target for diagnostics.
"""
from typing import Callable

import numpy as np

from tense.errors import ConfigError
from tense.models import geometry as geo
from tense.types import Array, Box, PointLike, PointsLike
import tense.tooling as tooling


def _background(pts: Array) -> Array:
    return 0.4 * np.sin(5 * pts[:, 0]) + 0.4 * np.cos(5 * pts[:, 1])


def smooth(pts: Array) -> Array:
    return _background(pts)


def toy1(pts: Array) -> Array:
    x = pts[:, 0]
    side = np.where(geo.toy1_regions(pts) == 1, 1.0, -1.0)
    jump = 0.8 * (x - geo.TOY1_TEAR_X) ** 2 * side * (x > geo.TOY1_TEAR_X)
    return _background(pts) + jump


def toy2(pts: Array) -> Array:
    x = pts[:, 0]
    region = geo.toy2_regions(pts)
    upper = 1.2 * (x - geo.TOY2_UPPER_X) ** 2 * (x > geo.TOY2_UPPER_X) * (region == 2)
    lower = 0.6 * (x - geo.TOY2_LOWER_X) ** 2 * (x > geo.TOY2_LOWER_X) * (region == 0)
    return _background(pts) + upper - lower


def curved(pts: Array) -> Array:
    region = geo.toy3_regions(pts)
    radius = np.linalg.norm(pts, axis=1)
    sign = np.where(region % 2 == 1, 1.0, -1.0)
    jump = sign * (radius - geo.TOY3_INNER_RADIUS) ** 2 * (region > 0)
    return 0.5 * (np.sin(3 * pts[:, 0]) + np.cos(3.5 * pts[:, 1])) + jump


TEST_FUNCTIONS: dict[str, tuple[Callable[[Array], Array], Box]] = {
    "toy1": (toy1, geo.TOY_DOMAIN),
    "toy2": (toy2, geo.TOY_DOMAIN),
    "curved": (curved, geo.TOY3_DOMAIN),
    "smooth": (smooth, geo.TOY_DOMAIN),
}


def resolve_function(name: str) -> tuple[Callable[[Array], Array], Box]:
    key = geo.canonical_name(name)
    if key not in TEST_FUNCTIONS:
        raise ConfigError(
            f"Unknown test function '{name}', expected one of {sorted(TEST_FUNCTIONS)}"
        )
    return TEST_FUNCTIONS[key]


def evaluate(name: str, points: PointsLike) -> Array:
    """Vectorised test function values; raises DomainError outside its domain."""
    func, box = resolve_function(name)
    pts = tooling.as_points(points)
    tooling.check_in_box(pts, box)
    return func(pts)


def eval_test_function(name: str, x: PointLike) -> float:
    return float(evaluate(name, [x])[0])

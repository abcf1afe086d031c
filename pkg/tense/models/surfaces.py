"""
Built-in torn embedding surfaces with analytic gradients.
"""
from typing import Any, Callable

import numpy as np

from tense.embedding.piecewise import piecewise_surface
from tense.embedding.surface import EmbeddingSurface, Piece
from tense.errors import ConfigError
from tense.models import geometry as geo
from tense.types import Array, Box


def _zero(pts: Array) -> Array:
    return np.zeros(len(pts))


def _zero_gradient(pts: Array) -> Array:
    return np.zeros((len(pts), 2))


FLAT = Piece(_zero, _zero_gradient)


def _shifted_square(coef: float, x0: float) -> Piece:
    """coef * (x - x0)^2 for x > x0, zero otherwise."""
    def value(pts: Array) -> Array:
        dx = np.maximum(pts[:, 0] - x0, 0.0)
        return coef * dx ** 2

    def gradient(pts: Array) -> Array:
        dx = np.maximum(pts[:, 0] - x0, 0.0)
        return np.column_stack([2 * coef * dx, np.zeros(len(pts))])

    return Piece(value, gradient)


def _moving_square(
    coef: float,
    boundary: Callable[[Array], Array],
    slope: float,
    xmax: float | None = None,
) -> Piece:
    """
    coef * u^2 for x > b(y), with u = x - b(y) or, given ``xmax``, the
    normalised u = (x - b(y)) / (xmax - b(y)). ``slope`` is db/dy.
    """
    def parts(pts: Array) -> tuple[Array, Array, Array]:
        x, y = pts[:, 0], pts[:, 1]
        b = boundary(y)
        dx = np.maximum(x - b, 0.0)
        width = np.ones_like(b) if xmax is None else xmax - b
        return x, dx, width

    def value(pts: Array) -> Array:
        _, dx, width = parts(pts)
        return coef * (dx / width) ** 2

    def gradient(pts: Array) -> Array:
        x, dx, width = parts(pts)
        u = dx / width
        dvdx = 2 * coef * u / width
        if xmax is None:
            dvdy = -2 * coef * dx * slope
        else:
            dvdy = 2 * coef * u * slope * (x - xmax) / width ** 2
        return np.column_stack([dvdx, dvdy])

    return Piece(value, gradient)


def _scaled_square(coef: float, x0: float, xmax: float) -> Piece:
    return _shifted_square(coef / (xmax - x0) ** 2, x0)


def _constant(level: float) -> Piece:
    return Piece(lambda pts: np.full(len(pts), level), _zero_gradient)


# region surfaces
def toy1_surface() -> EmbeddingSurface:
    """v = -0.4 (x - 0.75)^2 sign(y - 1) for x > 0.75."""
    return EmbeddingSurface(
        name="toy1",
        domain=geo.TOY_DOMAIN,
        region_of=geo.toy1_regions,
        pieces={
            0: _shifted_square(0.4, geo.TOY1_TEAR_X),
            1: _shifted_square(-0.4, geo.TOY1_TEAR_X),
        },
        tear_lines=geo.toy1_tears(),
    )


def toy2_surface() -> EmbeddingSurface:
    slope = (geo.TOY2_UPPER_X - geo.TOY2_LOWER_X) / (geo.TOY2_UPPER_Y - geo.TOY2_LOWER_Y)
    return EmbeddingSurface(
        name="toy2",
        domain=geo.TOY_DOMAIN,
        region_of=geo.toy2_regions,
        pieces={
            0: _shifted_square(-0.6, geo.TOY2_LOWER_X),
            1: _moving_square(0.6, geo.toy2_boundary, slope),
            2: FLAT,
        },
        tear_lines=geo.toy2_tears(),
    )


def _curved_piece(region: int) -> Piece:
    coef = 0.5 * (region - 2)

    def value(pts: Array) -> Array:
        radius = np.linalg.norm(pts, axis=1)
        return coef * (radius - geo.TOY3_INNER_RADIUS) ** 2

    def gradient(pts: Array) -> Array:
        radius = np.linalg.norm(pts, axis=1)
        scale = 2 * coef * (radius - geo.TOY3_INNER_RADIUS) / np.where(radius > 0, radius, 1.0)
        return pts * scale[:, None]

    return Piece(value, gradient)


def curved_surface() -> EmbeddingSurface:
    return EmbeddingSurface(
        name="curved",
        domain=geo.TOY3_DOMAIN,
        region_of=geo.toy3_regions,
        pieces={0: FLAT, 1: _curved_piece(1), 2: FLAT, 3: _curved_piece(3), 4: FLAT},
        tear_lines=geo.toy3_tears(),
    )


def olympus_surface() -> EmbeddingSurface:
    """
    Olympus fault surface: alternate regions bent up and down by normalised
    quadratics that start at the left end of each fault or at the line
    joining two fault ends, and a raised top region.
    """
    x_dis, y_dis, xmax = geo.OLYMPUS_X_DIS, geo.OLYMPUS_Y_DIS, geo.OLYMPUS_X_MAX
    slope1 = (x_dis[1] - x_dis[0]) / (y_dis[1] - y_dis[0])
    slope2 = (x_dis[2] - x_dis[1]) / (y_dis[2] - y_dis[1])
    return EmbeddingSurface(
        name="olympus",
        domain=geo.OLYMPUS_DOMAIN,
        region_of=geo.olympus_regions,
        pieces={
            0: _scaled_square(1.0, x_dis[0], xmax),
            1: _moving_square(-1.2, geo.olympus_b1, slope1, xmax),
            2: _moving_square(3.0, geo.olympus_b2, slope2, xmax),
            3: FLAT,
            4: _scaled_square(-2.0, x_dis[3], xmax),
            5: _constant(1.0),
        },
        tear_lines=geo.olympus_tears(),
    )


def planar_surface(a: float = 0.0, b: float = 0.0, domain: Box = geo.TOY_DOMAIN) -> EmbeddingSurface:
    """Untorn plane v = a x + b y."""
    def value(pts: Array) -> Array:
        return a * pts[:, 0] + b * pts[:, 1]

    def gradient(pts: Array) -> Array:
        return np.tile([a, b], (len(pts), 1)).astype(float)

    return EmbeddingSurface(
        name="planar",
        domain=tuple(domain), # type: ignore
        region_of=lambda pts: np.zeros(len(pts), dtype=int),
        pieces={0: Piece(value, gradient)},
    )


def flat_surface(domain: Box = geo.TOY_DOMAIN) -> EmbeddingSurface:
    return EmbeddingSurface(
        name="flat",
        domain=tuple(domain), # type: ignore
        region_of=lambda pts: np.zeros(len(pts), dtype=int),
        pieces={0: FLAT},
    )


BUILTIN_SURFACES: dict[str, Callable[..., EmbeddingSurface]] = {
    "toy1": toy1_surface,
    "toy2": toy2_surface,
    "curved": curved_surface,
    "olympus": olympus_surface,
    "planar": planar_surface,
    "flat": flat_surface,
}


def builtin_embedding(name: str, **params: Any) -> EmbeddingSurface:
    """
    Built-in surface by name.

    ``planar`` takes coefficients ``a`` and ``b``; ``planar`` and ``flat``
    also take a ``domain`` box.
    """
    key = geo.canonical_name(name)
    if key == "smooth":
        key = "flat"
    if key not in BUILTIN_SURFACES:
        raise ConfigError(
            f"Unknown surface '{name}', expected one of {sorted(BUILTIN_SURFACES)}"
        )
    try:
        return BUILTIN_SURFACES[key](**params)
    except TypeError as err:
        raise ConfigError(f"Bad parameters for surface '{name}': {err}") from err


def surface_from_config(spec: str | dict) -> EmbeddingSurface:
    """
    Resolve a surface given as a name, as ``{"name": ..., **params}`` or
    as a custom piecewise-quadratic object with a ``regions`` key.
    """
    if isinstance(spec, str):
        return builtin_embedding(spec)
    if not isinstance(spec, dict):
        raise ConfigError(f"Surface must be a name or an object, got {spec!r}")
    if 'regions' in spec:
        return piecewise_surface(spec)
    params = dict(spec)
    name = params.pop('name', None)
    if name is None:
        raise ConfigError(f"Surface object needs a 'name' or 'regions': {spec!r}")
    if 'domain' in params:
        params['domain'] = tuple(float(v) for v in params['domain'])
    return builtin_embedding(name, **params)

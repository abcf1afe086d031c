"""
Torn embedding surfaces.

A surface assigns every point of its 2-D domain to an integer region and
evaluates the height v(x, y) with the formula of that region only. Tears
are the curves where neighbouring regions meet with different heights; they
are kept as polylines for flagging and reporting.
"""
from dataclasses import dataclass, field
from typing import Callable, Mapping

import numpy as np

from tense import DEFAULTS
from tense.errors import NumericalError
from tense.types import Array, Box, PointLike, PointsLike
import tense.tooling as tooling


RegionFunc = Callable[[Array], np.ndarray]
ValueFunc = Callable[[Array], Array]
GradientFunc = Callable[[Array], Array]


# region types
@dataclass(frozen=True)
class Piece:
    """
    Smooth formula for one region.

    Attributes
    ----------
    value : callable
        Maps points of shape (n, 2) to heights of shape (n,).
    gradient : callable, optional
        Maps points of shape (n, 2) to (v_x, v_y) rows of shape (n, 2).
        Finite differences are used when missing.
    """
    value: ValueFunc
    gradient: GradientFunc | None = None


@dataclass(frozen=True)
class EmbeddingSurface:
    name: str
    domain: Box
    region_of: RegionFunc
    pieces: Mapping[int, Piece]
    tear_lines: tuple[Array, ...] = field(default=())

    def __post_init__(self):
        xmin, xmax, ymin, ymax = self.domain
        if not (xmax > xmin and ymax > ymin):
            raise ValueError(f"Domain {self.domain} of surface '{self.name}' is empty")
        if not self.pieces:
            raise ValueError(f"Surface '{self.name}' has no regions")
        tears = tuple(tooling.as_points(line) for line in self.tear_lines)
        for line in tears:
            if len(line) < 2:
                raise ValueError(f"Tear lines of '{self.name}' need at least two vertices")
        object.__setattr__(self, 'tear_lines', tears)

    @property
    def width(self) -> Array:
        xmin, xmax, ymin, ymax = self.domain
        return np.array([xmax - xmin, ymax - ymin])

    def prepare(self, points: PointsLike) -> Array:
        pts = tooling.as_points(points)
        tooling.check_in_box(pts, self.domain)
        return pts

    def regions(self, points: PointsLike) -> np.ndarray:
        pts = self.prepare(points)
        return self._regions(pts)

    def values(self, points: PointsLike) -> Array:
        pts = self.prepare(points)
        return self._values(pts, self._regions(pts))

    # unchecked variants for points already validated
    def _regions(self, pts: Array) -> np.ndarray:
        if len(pts) == 0:
            return np.empty(0, dtype=int)
        regions = np.asarray(self.region_of(pts), dtype=int)
        unknown = set(np.unique(regions)) - set(self.pieces)
        if unknown:
            raise ValueError(f"Surface '{self.name}' produced unknown regions {sorted(unknown)}")
        return regions

    def _values(self, pts: Array, regions: np.ndarray) -> Array:
        out = np.zeros(len(pts))
        for region in np.unique(regions):
            mask = regions == region
            out[mask] = self.pieces[region].value(pts[mask])
        return out


# region evaluation
def embed(surface: EmbeddingSurface, x: PointLike) -> Array:
    """Lift a single 2-D point to (x, y, v(x, y))."""
    return embed_points(surface, [x])[0]


def embed_points(surface: EmbeddingSurface, points: PointsLike) -> Array:
    pts = surface.prepare(points)
    heights = surface._values(pts, surface._regions(pts))
    return np.column_stack([pts, heights])


def surface_gradient(surface: EmbeddingSurface, x: PointLike) -> tuple[float, float]:
    """
    Gradient (v_x, v_y) at a single point.

    Analytic where the region provides one, otherwise region-aware finite
    differences that never take a stencil point from another region.
    """
    vx, vy = surface_gradients(surface, [x])[0]
    return float(vx), float(vy)


def surface_gradients(surface: EmbeddingSurface, points: PointsLike) -> Array:
    pts = surface.prepare(points)
    regions = surface._regions(pts)
    out = np.empty((len(pts), 2))
    numeric = np.zeros(len(pts), dtype=bool)
    for region in np.unique(regions):
        mask = regions == region
        gradient = surface.pieces[region].gradient
        if gradient is None:
            numeric |= mask
        else:
            out[mask] = gradient(pts[mask])
    if numeric.any():
        out[numeric] = finite_difference_gradient(surface, pts[numeric])
    return out


@tooling.inject_defaults(DEFAULTS['embedding'])
def finite_difference_gradient(
    surface: EmbeddingSurface,
    points: PointsLike,
    *,
    gradient_step: float | None = None,
) -> Array:
    """
    Region-aware finite difference gradients of shape (n, 2).

    The step per axis is ``gradient_step`` times the domain width. Central
    differences are used when both neighbours share the region of the point.
    Otherwise a second order one-sided stencil is taken on whichever side
    stays in the region, then a first order one. A point whose neighbours
    all lie across a tear or outside the domain raises NumericalError.
    """
    pts = surface.prepare(points)
    regions = surface._regions(pts)
    f0 = surface._values(pts, regions)
    out = np.empty((len(pts), 2))

    for axis in range(2):
        h = gradient_step * surface.width[axis] # type: ignore
        shifted = {}
        for k in (-2, -1, 1, 2):
            stencil = pts.copy()
            stencil[:, axis] += k * h
            inside = tooling.in_box(stencil, surface.domain)
            same = np.zeros(len(pts), dtype=bool)
            vals = np.full(len(pts), np.nan)
            if inside.any():
                stencil_regions = surface._regions(stencil[inside])
                same[inside] = stencil_regions == regions[inside]
                idx = np.flatnonzero(inside)[same[inside]]
                vals[idx] = surface._values(stencil[idx], regions[idx])
            shifted[k] = (same, vals)

        (m2, fm2), (m1, fm1) = shifted[-2], shifted[-1]
        (p1, fp1), (p2, fp2) = shifted[1], shifted[2]

        grad = np.full(len(pts), np.nan)
        central = m1 & p1
        grad[central] = (fp1[central] - fm1[central]) / (2 * h)

        forward2 = ~central & p1 & p2
        grad[forward2] = (-3 * f0[forward2] + 4 * fp1[forward2] - fp2[forward2]) / (2 * h)

        backward2 = ~central & ~forward2 & m1 & m2
        grad[backward2] = (3 * f0[backward2] - 4 * fm1[backward2] + fm2[backward2]) / (2 * h)

        done = central | forward2 | backward2
        forward1 = ~done & p1
        grad[forward1] = (fp1[forward1] - f0[forward1]) / h

        backward1 = ~done & ~forward1 & m1
        grad[backward1] = (f0[backward1] - fm1[backward1]) / h

        stuck = ~(done | forward1 | backward1)
        if stuck.any():
            first = pts[stuck][0]
            raise NumericalError(
                f"Cannot difference surface '{surface.name}' along axis {axis} at "
                f"({first[0]:g}, {first[1]:g}): no neighbour in the same region"
            )
        out[:, axis] = grad
    return out


# region tears
def tear_distance(surface: EmbeddingSurface, points: PointsLike) -> Array:
    """Euclidean distance from each point to the nearest tear polyline; inf without tears."""
    pts = tooling.as_points(points)
    best = np.full(len(pts), np.inf)
    for line in surface.tear_lines:
        starts, ends = line[:-1], line[1:]
        seg = ends - starts
        seg_len_sq = np.einsum('ij,ij->i', seg, seg)
        rel = pts[:, None, :] - starts[None, :, :]
        with np.errstate(invalid='ignore', divide='ignore'):
            t = np.einsum('nij,ij->ni', rel, seg) / seg_len_sq
        t = np.clip(np.nan_to_num(t), 0.0, 1.0)
        nearest = starts[None, :, :] + t[..., None] * seg[None, :, :]
        dist = np.linalg.norm(pts[:, None, :] - nearest, axis=2).min(axis=1)
        best = np.minimum(best, dist)
    return best


@tooling.inject_defaults(DEFAULTS['embedding'])
def on_tear(
    surface: EmbeddingSurface,
    points: PointsLike,
    *,
    tear_tolerance: float | None = None,
) -> np.ndarray:
    """Mask of points lying on a tear, within ``tear_tolerance`` times the domain diagonal."""
    scale = float(np.linalg.norm(surface.width))
    return tear_distance(surface, points) <= tear_tolerance * scale # type: ignore

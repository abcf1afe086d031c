"""
Custom piecewise-quadratic surfaces read from configuration.

Example
-------
{
    "name": "step",
    "domain": [0, 2, 0, 2],
    "regions": [
        {"id": 0, "y": [null, 1.0], "quadratic": {"cxx": -0.4}},
        {"id": 1, "y": [1.0, null], "inequalities": [[1, 0, -0.5]],
         "quadratic": {"c0": 0.1, "cx": 0.2}},
        {"id": 2, "quadratic": {}}
    ],
    "tears": [[[0.5, 1.0], [2.0, 1.0]]]
}

Intervals are half-open ``[lo, hi)`` with ``null`` for an open end; an upper
bound on the domain edge is closed. Each inequality ``[a, b, c]`` requires
``a*x + b*y + c >= 0``. Regions are tried in order and the first match wins.
The height is ``c0 + cx*x + cy*y + cxx*x^2 + cxy*x*y + cyy*y^2``.
"""
from dataclasses import dataclass, field
from typing import Any

import numpy as np

from tense.embedding.surface import EmbeddingSurface, Piece
from tense.errors import ConfigError, DomainError
from tense.types import Array, Box


COEFFICIENTS = ("c0", "cx", "cy", "cxx", "cxy", "cyy")


@dataclass(frozen=True)
class Quadratic:
    c0: float = 0.0
    cx: float = 0.0
    cy: float = 0.0
    cxx: float = 0.0
    cxy: float = 0.0
    cyy: float = 0.0

    def value(self, pts: Array) -> Array:
        x, y = pts[:, 0], pts[:, 1]
        return (
            self.c0 + self.cx * x + self.cy * y
            + self.cxx * x ** 2 + self.cxy * x * y + self.cyy * y ** 2
        )

    def gradient(self, pts: Array) -> Array:
        x, y = pts[:, 0], pts[:, 1]
        return np.column_stack([
            self.cx + 2 * self.cxx * x + self.cxy * y,
            self.cy + self.cxy * x + 2 * self.cyy * y,
        ])


@dataclass(frozen=True)
class RegionRule:
    id: int
    x: tuple[float | None, float | None] = (None, None)
    y: tuple[float | None, float | None] = (None, None)
    inequalities: tuple[tuple[float, float, float], ...] = field(default=())

    def contains(self, pts: Array, domain: Box) -> np.ndarray:
        xmin, xmax, ymin, ymax = domain
        mask = _interval(pts[:, 0], self.x, xmax) & _interval(pts[:, 1], self.y, ymax)
        for a, b, c in self.inequalities:
            mask &= a * pts[:, 0] + b * pts[:, 1] + c >= 0
        return mask


def _interval(values: Array, bounds, edge: float) -> np.ndarray:
    lo, hi = bounds
    mask = np.ones(len(values), dtype=bool)
    if lo is not None:
        mask &= values >= lo
    if hi is not None:
        mask &= (values < hi) | ((values == hi) & (hi >= edge))
    return mask


def _parse_bounds(raw: Any, key: str, region: Any) -> tuple[float | None, float | None]:
    if raw is None:
        return (None, None)
    if not isinstance(raw, (list, tuple)) or len(raw) != 2:
        raise ConfigError(f"Region {region}: '{key}' must be a [lo, hi] pair, got {raw!r}")
    lo, hi = (None if v is None else float(v) for v in raw)
    if lo is not None and hi is not None and not hi > lo:
        raise ConfigError(f"Region {region}: empty '{key}' interval {raw!r}")
    return lo, hi


def parse_region(spec: dict) -> tuple[RegionRule, Quadratic]:
    if 'id' not in spec:
        raise ConfigError(f"Region definition without 'id': {spec!r}")
    region = int(spec['id'])
    inequalities = []
    for item in spec.get('inequalities', []):
        if len(item) != 3:
            raise ConfigError(f"Region {region}: inequality must be [a, b, c], got {item!r}")
        inequalities.append(tuple(float(v) for v in item))

    coefficients = spec.get('quadratic', {})
    unknown = set(coefficients) - set(COEFFICIENTS)
    if unknown:
        raise ConfigError(f"Region {region}: unknown coefficients {sorted(unknown)}")

    rule = RegionRule(
        id=region,
        x=_parse_bounds(spec.get('x'), 'x', region),
        y=_parse_bounds(spec.get('y'), 'y', region),
        inequalities=tuple(inequalities), # type: ignore
    )
    return rule, Quadratic(**{k: float(v) for k, v in coefficients.items()})


def piecewise_surface(spec: dict) -> EmbeddingSurface:
    """Build an EmbeddingSurface from a piecewise-quadratic configuration object."""
    try:
        domain = tuple(float(v) for v in spec['domain'])
        raw_regions = spec['regions']
    except KeyError as err:
        raise ConfigError(f"Custom surface is missing key {err}") from err
    if len(domain) != 4:
        raise ConfigError(f"Surface domain must be [xmin, xmax, ymin, ymax], got {spec['domain']!r}")
    if not raw_regions:
        raise ConfigError("Custom surface needs at least one region")

    parsed = [parse_region(item) for item in raw_regions]
    ids = [rule.id for rule, _ in parsed]
    if len(set(ids)) != len(ids):
        raise ConfigError(f"Duplicate region ids in custom surface: {ids}")

    def region_of(pts: Array) -> np.ndarray:
        out = np.full(len(pts), -1, dtype=int)
        for rule, _ in parsed:
            free = out < 0
            if not free.any():
                break
            hit = free & rule.contains(pts, domain) # type: ignore
            out[hit] = rule.id
        if (out < 0).any():
            first = pts[out < 0][0]
            raise DomainError(
                f"No region of custom surface covers ({first[0]:g}, {first[1]:g})"
            )
        return out

    pieces = {rule.id: Piece(quad.value, quad.gradient) for rule, quad in parsed}
    try:
        tears = tuple(np.asarray(line, dtype=float) for line in spec.get('tears', []))
        return EmbeddingSurface(
            name=spec.get('name', 'custom'),
            domain=domain, # type: ignore
            region_of=region_of,
            pieces=pieces,
            tear_lines=tears,
        )
    except ValueError as err:
        raise ConfigError(f"Invalid custom surface: {err}") from err

"""
Discontinuity geometry shared by the test functions and the built-in surfaces.

Region labels follow half-open intervals in y: a point exactly on a fault
belongs to the region above it.
"""
import numpy as np

from tense.errors import ConfigError
from tense.types import Array, Box, PointLike, PointsLike
import tense.tooling as tooling


# region constants
TOY_DOMAIN: Box = (0.0, 2.0, 0.0, 2.0)
TOY3_DOMAIN: Box = (-1.0, 1.0, -1.0, 1.0)
OLYMPUS_DOMAIN: Box = (0.0, 118.0, 0.0, 140.0)

TOY1_TEAR_X = 0.75
TOY1_TEAR_Y = 1.0

TOY2_LOWER_X = 0.6
TOY2_LOWER_Y = 0.75
TOY2_UPPER_X = 1.0
TOY2_UPPER_Y = 1.25

TOY3_INNER_RADIUS = 0.4
TOY3_CENTRES = np.array([[1.0, 0.0], [0.0, 1.0], [-1.0, 0.0], [0.0, -1.0]])

OLYMPUS_Y_DIS = (73.5, 85.5, 99.5, 103.5, 123.5)
OLYMPUS_X_DIS = (94.0, 52.0, 64.0, 87.0, 0.0)
OLYMPUS_X_MAX = 118.0
OLYMPUS_GHOST_INSET = 2.0


# region interpolating lines
def toy2_boundary(y: Array) -> Array:
    """x position of the line joining the inner ends of the two toy-2 tears."""
    frac = (np.asarray(y) - TOY2_LOWER_Y) / (TOY2_UPPER_Y - TOY2_LOWER_Y)
    return TOY2_LOWER_X + (TOY2_UPPER_X - TOY2_LOWER_X) * frac


def olympus_b1(y: Array) -> Array:
    y1, y2 = OLYMPUS_Y_DIS[0], OLYMPUS_Y_DIS[1]
    x1, x2 = OLYMPUS_X_DIS[0], OLYMPUS_X_DIS[1]
    return x1 + (np.asarray(y) - y1) / (y2 - y1) * (x2 - x1)


def olympus_b2(y: Array) -> Array:
    y2, y3 = OLYMPUS_Y_DIS[1], OLYMPUS_Y_DIS[2]
    x2, x3 = OLYMPUS_X_DIS[1], OLYMPUS_X_DIS[2]
    return x2 + (np.asarray(y) - y2) / (y3 - y2) * (x3 - x2)


# region regions
def toy1_regions(pts: Array) -> np.ndarray:
    """0 below the tear line y = 1, 1 on or above it."""
    return (pts[:, 1] >= TOY1_TEAR_Y).astype(int)


def toy2_regions(pts: Array) -> np.ndarray:
    """0 below y = 0.75, 1 between the tears, 2 on or above y = 1.25."""
    y = pts[:, 1]
    return (y >= TOY2_LOWER_Y).astype(int) + (y >= TOY2_UPPER_Y).astype(int)


def toy3_regions(pts: Array) -> np.ndarray:
    """
    Region identifier of the curved-discontinuity function.

    0 inside the disc of radius 0.4; otherwise sector k in 1..4 lies inside
    circle k and outside circle k+1 (cyclic), the circles having radius 1
    and centres (1, 0), (0, 1), (-1, 0), (0, -1). Points no circle claims,
    such as the box corners, take the sector of their polar angle.
    """
    radius = np.linalg.norm(pts, axis=1)
    inside = np.stack(
        [((pts - centre) ** 2).sum(axis=1) < 1 for centre in TOY3_CENTRES],
        axis=1,
    )
    out = np.zeros(len(pts), dtype=int)
    outer = radius >= TOY3_INNER_RADIUS
    unassigned = outer.copy()
    for k in range(4):
        hit = unassigned & inside[:, k] & ~inside[:, (k + 1) % 4]
        out[hit] = k + 1
        unassigned &= ~hit

    if unassigned.any():
        angle = np.arctan2(pts[unassigned, 1], pts[unassigned, 0])
        sector = np.floor((angle + np.pi / 4) / (np.pi / 2)).astype(int) % 4
        out[unassigned] = sector + 1
    return out


def single_region(pts: Array) -> np.ndarray:
    return np.zeros(len(pts), dtype=int)


def olympus_regions(pts: Array) -> np.ndarray:
    """0 below the first fault up to 5 on or above the fifth fault."""
    return np.searchsorted(np.asarray(OLYMPUS_Y_DIS), pts[:, 1], side='right')


# region tears
def toy1_tears() -> tuple[Array, ...]:
    xmax = TOY_DOMAIN[1]
    return (np.array([[TOY1_TEAR_X, TOY1_TEAR_Y], [xmax, TOY1_TEAR_Y]]),)


def toy2_tears() -> tuple[Array, ...]:
    xmax = TOY_DOMAIN[1]
    return (
        np.array([[TOY2_LOWER_X, TOY2_LOWER_Y], [xmax, TOY2_LOWER_Y]]),
        np.array([[TOY2_UPPER_X, TOY2_UPPER_Y], [xmax, TOY2_UPPER_Y]]),
    )


def toy3_tears(vertices: int = 64) -> tuple[Array, ...]:
    """
    Polylines along the four circular arcs separating adjacent sectors.

    The arc between sectors 1 and 2 lies on the circle centred at (0, 1),
    from radius 0.4 out to the corner (1, 1); the others are its rotations
    by multiples of a quarter turn.
    """
    t = np.linspace(-np.pi / 2, 0.0, 4 * vertices)
    arc = np.column_stack([np.cos(t), 1 + np.sin(t)])
    arc = arc[np.linalg.norm(arc, axis=1) >= TOY3_INNER_RADIUS]
    idx = np.unique(np.linspace(0, len(arc) - 1, vertices).astype(int))
    arc = arc[idx]

    quarter = np.array([[0.0, -1.0], [1.0, 0.0]])
    lines = []
    rotation = np.eye(2)
    for _ in range(4):
        lines.append(arc @ rotation.T)
        rotation = quarter @ rotation
    return tuple(lines)


def olympus_tears() -> tuple[Array, ...]:
    return tuple(
        np.array([[x, y], [OLYMPUS_X_MAX, y]])
        for x, y in zip(OLYMPUS_X_DIS, OLYMPUS_Y_DIS)
    )


def olympus_ghost_boundary() -> Array:
    """Closed polyline just inside the Olympus box edge, where ghost runs sit."""
    xmin, xmax, ymin, ymax = OLYMPUS_DOMAIN
    d = OLYMPUS_GHOST_INSET
    return np.array([
        [xmin + d, ymin + d],
        [xmax - d, ymin + d],
        [xmax - d, ymax - d],
        [xmin + d, ymax - d],
        [xmin + d, ymin + d],
    ])


# region lookup
REGION_FUNCS = {
    "toy1": (toy1_regions, TOY_DOMAIN),
    "smooth": (single_region, TOY_DOMAIN),
    "toy2": (toy2_regions, TOY_DOMAIN),
    "curved": (toy3_regions, TOY3_DOMAIN),
    "olympus": (olympus_regions, OLYMPUS_DOMAIN),
}

ALIASES = {
    "toy3": "curved",
    "two_rift": "toy2",
    "smooth_no_jump": "smooth",
}


def canonical_name(name: str) -> str:
    key = name.lower().replace('-', '_')
    return ALIASES.get(key, key)


def domain_of(name: str) -> Box:
    key = canonical_name(name)
    if key not in REGION_FUNCS:
        raise ConfigError(f"Unknown geometry '{name}', expected one of {sorted(REGION_FUNCS)}")
    return REGION_FUNCS[key][1]


def region_ids(name: str, points: PointsLike) -> np.ndarray:
    key = canonical_name(name)
    box = domain_of(key)
    pts = tooling.as_points(points)
    tooling.check_in_box(pts, box)
    func, _ = REGION_FUNCS[key]
    return func(pts)


def region_id(name: str, x: PointLike) -> int:
    """Region label of a single point for a named geometry."""
    return int(region_ids(name, [x])[0])


def toy_grid_design(n_side: int = 4, box: Box = TOY_DOMAIN) -> Array:
    """Cell-centred n_side by n_side design; the default is the 16-run toy grid."""
    if n_side < 1:
        raise ValueError(f"n_side must be positive, got {n_side}")
    return tooling.cell_centred_grid(box, n_side, n_side)

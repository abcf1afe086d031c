"""
Fixed design points: run pairs straddling a fault and zero-valued ghost runs.
"""
from typing import Sequence

import numpy as np

from tense.embedding.surface import EmbeddingSurface
from tense.emulator.adjust import GHOST, TrainingSet
from tense.types import Array, PointsLike
import tense.tooling as tooling


def fault_height(segment: PointsLike, x: float) -> float:
    """y of the fault segment's line at x."""
    (x0, y0), (x1, y1) = tooling.as_points(segment)[[0, -1]]
    if x1 == x0:
        raise ValueError(f"Fault segment {segment!r} is vertical; no height at x={x}")
    return float(y0 + (x - x0) * (y1 - y0) / (x1 - x0))


def straddle_pairs(
    surface: EmbeddingSurface,
    faults: Sequence[PointsLike],
    offsets: float | Sequence[float],
    xs: Sequence[float | Sequence[float]],
) -> list[tuple[Array, Array]]:
    """
    Pairs of points just above and just below faults.

    Parameters
    ----------
    surface : EmbeddingSurface
        Surface whose regions the two points of a pair must differ in.
    faults : list of segments
        Each fault as two (x, y) end points.
    offsets : float or list of float
        Vertical distance of each point from its fault, one per fault or shared.
    xs : list
        For each fault, an x location or a list of them.

    Returns
    -------
    list of (upper, lower) point pairs
    """
    if len(xs) != len(faults):
        raise ValueError(f"Need one entry of xs per fault, got {len(xs)} for {len(faults)} faults")
    offs = np.broadcast_to(np.asarray(offsets, dtype=float), (len(faults),))
    if (offs <= 0).any():
        raise ValueError(f"Straddle offsets must be positive, got {offsets!r}")

    pairs = []
    for fault, offset, fault_xs in zip(faults, offs, xs):
        for x in np.atleast_1d(np.asarray(fault_xs, dtype=float)):
            y = fault_height(fault, x)
            pair = np.array([[x, y + offset], [x, y - offset]])
            upper, lower = surface.regions(pair)
            if upper == lower:
                raise ValueError(
                    f"Straddle pair at x={x:g} around y={y:g} with offset {offset:g} "
                    f"lies in a single region ({upper}); the offset is too large or the "
                    f"fault does not reach x"
                )
            pairs.append((pair[0], pair[1]))
    return pairs


def ghost_points(boundary: PointsLike, count: int) -> TrainingSet:
    """
    ``count`` zero-valued runs evenly spaced by arc length along a polyline.

    A closed polyline (first vertex repeated at the end) is split into
    ``count`` equal arcs; an open one includes both end points.
    """
    if count < 0:
        raise ValueError(f"count must be nonnegative, got {count}")
    line = tooling.as_points(boundary)
    if len(line) < 2:
        raise ValueError("Ghost boundary needs at least two vertices")
    seg = np.linalg.norm(np.diff(line, axis=0), axis=1)
    total = seg.sum()
    if not total > 0:
        raise ValueError("Ghost boundary has zero length")
    if count == 0:
        return TrainingSet.empty()

    closed = np.allclose(line[0], line[-1])
    if closed:
        stations = np.arange(count) * total / count
    elif count == 1:
        stations = np.array([0.0])
    else:
        stations = np.linspace(0.0, total, count)

    cumulative = np.concatenate([[0.0], np.cumsum(seg)])
    idx = np.clip(np.searchsorted(cumulative, stations, side='right') - 1, 0, len(seg) - 1)
    frac = np.where(seg[idx] > 0, (stations - cumulative[idx]) / np.where(seg[idx] > 0, seg[idx], 1), 0)
    pts = line[idx] + frac[:, None] * (line[idx + 1] - line[idx])
    return TrainingSet(pts, np.zeros(count), (GHOST,) * count)

import inspect
from concurrent.futures import ThreadPoolExecutor
from functools import wraps
from typing import Callable, TypeVar

import numpy as np

from tense import DEFAULTS
from tense.errors import DomainError
from tense.types import Array, Box, PointsLike


T = TypeVar('T')

def inject_defaults(defaults: dict) -> Callable:
    """
    Load defaults if keywords are None or undefined when calling a function.

    Arguments
    ---------
    defaults (dict):
        Dictionary of keywords and default values.

    Return
    ------
    func:
        Function that will load defaults.

    Notes
    -----
    This decorator will override any default values set in the function definition.
    Keywords that are filled in must be keyword-only in the decorated function.
    Only keys that name a parameter of the function are injected.
    """
    def decorator(func):
        accepted = set(inspect.signature(func).parameters)
        used = {key: val for key, val in defaults.items() if key in accepted}

        @wraps(func)
        def wrapper(*args, **kwargs):
            for key, val in used.items():
                if kwargs.get(key) is None:
                    kwargs[key] = val
            return func(*args, **kwargs)
        return wrapper
    return decorator


# region points
def as_points(points: PointsLike, dim: int = 2) -> Array:
    """Coerce a point or a list of points to a float array of shape (n, dim)."""
    arr = np.asarray(points, dtype=float)
    if arr.size == 0:
        return np.empty((0, dim))
    if arr.ndim == 1:
        arr = arr.reshape(1, -1)
    if arr.ndim != 2 or arr.shape[1] != dim:
        raise ValueError(f"Expected points of dimension {dim}, got array of shape {arr.shape}")
    return arr


def in_box(points: Array, box: Box) -> np.ndarray:
    xmin, xmax, ymin, ymax = box
    x, y = points[:, 0], points[:, 1]
    return (x >= xmin) & (x <= xmax) & (y >= ymin) & (y <= ymax)


def check_in_box(points: Array, box: Box) -> None:
    inside = in_box(points, box)
    if not inside.all():
        first = points[~inside][0]
        raise DomainError(
            f"{(~inside).sum()} point(s) outside domain {box}, "
            f"first offender ({first[0]:g}, {first[1]:g})"
        )


def regular_grid(box: Box, nx: int, ny: int) -> Array:
    """
    Regular grid including the box edges, row-major in y then x.

    The first row holds all x values at the smallest y.
    """
    if nx < 2 or ny < 2:
        raise ValueError(f"Grid sizes must be at least 2, got {nx}x{ny}")
    xmin, xmax, ymin, ymax = box
    xs = np.linspace(xmin, xmax, nx)
    ys = np.linspace(ymin, ymax, ny)
    gx, gy = np.meshgrid(xs, ys)
    return np.column_stack([gx.ravel(), gy.ravel()])


def cell_centred_grid(box: Box, nx: int, ny: int) -> Array:
    """Grid at the centres of an nx by ny partition of the box, row-major in y then x."""
    xmin, xmax, ymin, ymax = box
    xs = xmin + (np.arange(nx) + 0.5) * (xmax - xmin) / nx
    ys = ymin + (np.arange(ny) + 0.5) * (ymax - ymin) / ny
    gx, gy = np.meshgrid(xs, ys)
    return np.column_stack([gx.ravel(), gy.ravel()])


# region threads
def num_threads() -> int:
    """Worker threads for chunked evaluation; ``TENSE_NUM_THREADS`` is merged into ``threads`` on load."""
    return int(DEFAULTS['threads'])


def map_chunks(
    func: Callable[[Array], T],
    points: Array,
    chunk_size: int,
) -> list[T]:
    """
    Apply func to consecutive chunks of points, in order.

    Chunks run on a thread pool when more than one thread is configured;
    numpy releases the GIL inside the heavy linear algebra.
    """
    chunks = [points[i:i + chunk_size] for i in range(0, len(points), chunk_size)]
    if not chunks:
        return []
    workers = min(num_threads(), len(chunks))
    if workers <= 1:
        return [func(chunk) for chunk in chunks]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(func, chunks))

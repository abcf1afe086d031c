"""
Plain-text result tables.

All tables are comma separated with a header row, '\\n' line endings and
floats in ``%.<precision>g``, so equal inputs give byte-identical files.
Design tables keep full precision.
"""
import json
from pathlib import Path
from typing import Any

import numpy as np
import pandas as pd

from tense import DEFAULTS
from tense.types import Array, PointsLike
import tense.tooling as tooling


GRID_COLUMNS = ['x', 'y', 'mean', 'sd']
DESIGN_COLUMNS = ['index', 'x', 'y', 'source']


def _float_format(precision: int | None) -> str:
    if precision is None:
        precision = DEFAULTS['output']['precision']
    return f"%.{precision}g"


def write_table(df: pd.DataFrame, path: str | Path, precision: int | None = None) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    df.to_csv(path, index=False, float_format=_float_format(precision), lineterminator='\n')
    return path


def write_grid_csv(df: pd.DataFrame, path: str | Path, precision: int | None = None) -> Path:
    """Grid predictions with columns x, y, mean, sd."""
    missing = set(GRID_COLUMNS) - set(df.columns)
    if missing:
        raise KeyError(f"Grid frame lacks columns {sorted(missing)}")
    return write_table(df[GRID_COLUMNS], path, precision)


def read_grid_csv(path: str | Path) -> pd.DataFrame:
    return pd.read_csv(path)


def write_design_csv(df: pd.DataFrame, path: str | Path) -> Path:
    """
    Design table with columns index, x, y, source. Coordinates are written
    as shortest round-trip floats whatever the output precision.
    """
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    df[DESIGN_COLUMNS].to_csv(path, index=False, lineterminator='\n')
    return path


def samples_frame(grid: PointsLike, samples: Array) -> pd.DataFrame:
    """Samples table: x, y then one column sample_<j> per draw, j from 1."""
    pts = tooling.as_points(grid)
    samples = np.asarray(samples, dtype=float)
    if samples.shape[0] != len(pts):
        raise ValueError(f"Got {samples.shape[0]} sample rows for {len(pts)} grid points")
    columns = {f"sample_{j + 1}": samples[:, j] for j in range(samples.shape[1])}
    return pd.DataFrame({'x': pts[:, 0], 'y': pts[:, 1], **columns})


def write_samples_csv(
    grid: PointsLike,
    samples: Array,
    path: str | Path,
    precision: int | None = None,
) -> Path:
    return write_table(samples_frame(grid, samples), path, precision)


def write_npz(path: str | Path, **arrays: Array) -> Path:
    """Full-precision arrays in a numpy archive."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    np.savez(path, **{key: np.asarray(val) for key, val in arrays.items()})
    return path


def _to_builtin(obj: Any) -> Any:
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, np.generic):
        return obj.item()
    if isinstance(obj, pd.DataFrame):
        return obj.to_dict(orient='records')
    if isinstance(obj, Path):
        return str(obj)
    raise TypeError(f"Object of type {type(obj).__name__} is not JSON serializable")


def write_json(obj: Any, path: str | Path) -> Path:
    """JSON with numpy and pandas values converted; non-finite floats become null."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    text = json.dumps(_finite(obj), indent=2, default=_to_builtin)
    path.write_text(text + "\n")
    return path


def _finite(obj: Any) -> Any:
    if isinstance(obj, dict):
        return {key: _finite(val) for key, val in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_finite(val) for val in obj]
    if isinstance(obj, np.ndarray):
        return _finite(obj.tolist())
    if isinstance(obj, pd.DataFrame):
        return _finite(obj.to_dict(orient='records'))
    if isinstance(obj, (float, np.floating)) and not np.isfinite(obj):
        return None
    return obj

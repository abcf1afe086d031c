"""
Reading run values and design tables.
"""
import re
from pathlib import Path
from typing import Sequence

import numpy as np
import pandas as pd

from tense.emulator.adjust import GHOST, TrainingSet
from tense.errors import ConfigError
from tense.models.functions import evaluate
from tense.types import PointsLike


DESIGN_COLUMNS = ['index', 'x', 'y', 'source']
RUN_COLUMNS = ['x', 'y', 'value']
DESIGN_FILE = "design_wave{wave}.csv"


def read_runs(path: str | Path) -> TrainingSet:
    """Runs from a CSV with columns x, y, value and an optional label."""
    path = Path(path)
    if not path.is_file():
        raise ConfigError(f"Run file not found: {path}")
    df = pd.read_csv(path, float_precision='round_trip')
    missing = set(RUN_COLUMNS) - set(df.columns)
    if missing:
        raise ConfigError(f"Run file {path} lacks columns {sorted(missing)}")
    return TrainingSet.from_frame(df)


def design_frame(
    ghost: PointsLike = (),
    straddle: PointsLike = (),
    greedy: PointsLike = (),
) -> pd.DataFrame:
    """Design table ordered ghost, straddle, greedy with a running index."""
    parts = []
    for source, pts in (("ghost", ghost), ("straddle", straddle), ("greedy", greedy)):
        arr = np.asarray(pts, dtype=float).reshape(-1, 2)
        parts.append(pd.DataFrame({'x': arr[:, 0], 'y': arr[:, 1], 'source': source}))
    df = pd.concat(parts, ignore_index=True)
    df.insert(0, 'index', np.arange(len(df)))
    return df[DESIGN_COLUMNS]


def read_design(path: str | Path) -> pd.DataFrame:
    path = Path(path)
    if not path.is_file():
        raise ConfigError(f"Design file not found: {path}")
    df = pd.read_csv(path, float_precision='round_trip')
    missing = set(DESIGN_COLUMNS) - set(df.columns)
    if missing:
        raise ConfigError(f"Design file {path} lacks columns {sorted(missing)}")
    return df


def design_files(directory: str | Path, before: int | None = None) -> list[Path]:
    """design_wave<k>.csv files in wave order, optionally only waves below ``before``."""
    pattern = re.compile(r"design_wave(\d+)\.csv$")
    found = []
    for path in Path(directory).glob("design_wave*.csv"):
        match = pattern.search(path.name)
        if match and (before is None or int(match.group(1)) < before):
            found.append((int(match.group(1)), path))
    return [path for _, path in sorted(found)]


def training_from_designs(paths: Sequence[str | Path], function: str | None) -> TrainingSet:
    """
    Runs for the points of design tables: ghost rows get the value 0, the
    others are evaluated with the named test function.
    """
    frames = [read_design(path) for path in paths]
    if not frames:
        return TrainingSet.empty()
    df = pd.concat(frames, ignore_index=True)
    ghost = (df['source'] == GHOST).to_numpy()
    if (~ghost).any() and function is None:
        raise ConfigError("Evaluating design points needs a 'function' or a runs.path")

    values = np.zeros(len(df))
    pts = df[['x', 'y']].to_numpy(float)
    if (~ghost).any():
        values[~ghost] = evaluate(function, pts[~ghost]) # type: ignore
    labels = tuple(GHOST if g else "" for g in ghost)
    return TrainingSet(pts, values, labels)

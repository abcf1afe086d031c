import logging

import numpy as np
import pandas as pd

from tense.emulator.adjust import PriorSpec, TrainingSet, adjusted_moments, build_emulator


logger = logging.getLogger(__name__)

LOO_COLUMNS = ['x', 'y', 'value', 'mean', 'sd', 'std_error']


def standardized_errors(values: np.ndarray, means: np.ndarray, sds: np.ndarray) -> np.ndarray:
    """(value - mean) / sd, with 0 / 0 read as 0 and nonzero / 0 as +-inf."""
    diff = values - means
    with np.errstate(divide='ignore', invalid='ignore'):
        out = diff / sds
    out[(sds == 0) & (diff == 0)] = 0.0
    return out


def loo_diagnostics(prior: PriorSpec, data: TrainingSet) -> pd.DataFrame:
    """
    Leave-one-out diagnostics.

    Each non-ghost run is dropped in turn, the emulator is rebuilt from the
    remaining runs (ghost runs included) and the dropped run is predicted.

    Returns
    -------
    pd.DataFrame
        One row per non-ghost run with columns x, y, value, mean, sd and
        std_error = (value - mean) / sd.
    """
    real = int((~data.ghost_mask).sum())
    if real < 3:
        raise ValueError(f"Leave-one-out needs at least 3 non-ghost runs, got {real}")

    targets = np.flatnonzero(~data.ghost_mask)
    rows = []
    for i in targets:
        em = build_emulator(prior, data.without(i))
        mean, var = adjusted_moments(em, data.points[i])
        rows.append((*data.points[i], data.values[i], mean, np.sqrt(var)))

    df = pd.DataFrame(rows, columns=LOO_COLUMNS[:-1])
    df['std_error'] = standardized_errors(
        df['value'].to_numpy(), df['mean'].to_numpy(), df['sd'].to_numpy()
    )
    outliers = int((df['std_error'].abs() > 3).sum())
    logger.info("Leave-one-out on %d runs: %d standardized errors beyond 3", len(df), outliers)
    return df

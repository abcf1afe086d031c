"""
Upper credible interval regions for later design waves.

A point stays in the region while E_D[f] + c sd_D[f] > f_plus - delta, so
it may still beat the best value seen so far.
"""
from dataclasses import dataclass, field

import numpy as np

from tense import DEFAULTS
from tense.emulator.adjust import AdjustedEmulator, predict
from tense.types import Array, PointsLike


@dataclass(frozen=True)
class UciSpec:
    f_plus: float
    c: float = field(default_factory=lambda: DEFAULTS['uci']['c'])
    delta: float = field(default_factory=lambda: DEFAULTS['uci']['delta'])

    def __post_init__(self):
        if not self.c > 0:
            raise ValueError(f"c must be positive, got {self.c}")
        if self.delta < 0:
            raise ValueError(f"delta must be nonnegative, got {self.delta}")


def uci_value(em: AdjustedEmulator, grid: PointsLike, uci: UciSpec) -> Array:
    """E_D[f] + c sd_D[f] on the grid."""
    pred = predict(em, grid)
    return pred.mean + uci.c * pred.sd


def uci_region(em: AdjustedEmulator, grid: PointsLike, uci: UciSpec) -> np.ndarray:
    return uci_value(em, grid, uci) > uci.f_plus - uci.delta

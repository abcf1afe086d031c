from dataclasses import dataclass, field

import numpy as np

from tense.types import Array


@dataclass(frozen=True)
class NpvParams:
    """
    Discounted cash flow inputs.

    Attributes
    ----------
    d : float
        Discount rate per period, as a fraction (0.08 for 8%).
    tau : float
        Length of the discounting period in the units of ``times``.
    times : array
        Times t_i at which the profits are booked.
    profits : array
        Profit R(t_i) of each period.
    """
    d: float
    tau: float
    times: Array = field(compare=False)
    profits: Array = field(compare=False)

    def __post_init__(self):
        times = np.asarray(self.times, dtype=float).ravel()
        profits = np.asarray(self.profits, dtype=float).ravel()
        if len(times) != len(profits):
            raise ValueError(
                f"times and profits must have equal length, got {len(times)} and {len(profits)}"
            )
        if not self.tau > 0:
            raise ValueError(f"tau must be positive, got {self.tau}")
        if self.d < 0:
            raise ValueError(f"d must be nonnegative, got {self.d}")
        object.__setattr__(self, 'times', times)
        object.__setattr__(self, 'profits', profits)


def npv(params: NpvParams) -> float:
    """Net present value sum_i R(t_i) / (1 + d)^(t_i / tau)."""
    discount = (1 + params.d) ** (params.times / params.tau)
    return float(np.sum(params.profits / discount))

from typing import Literal, Sequence, TypeAlias

import numpy as np
import numpy.typing as npt

Array: TypeAlias = npt.NDArray[np.float64]
PointLike: TypeAlias = Sequence[float] | Array
PointsLike: TypeAlias = Sequence[Sequence[float]] | Array
Box: TypeAlias = tuple[float, float, float, float]
KernelFamily: TypeAlias = Literal["squared_exponential", "matern"]
KernelMode: TypeAlias = Literal["stationary", "tense"]
Source: TypeAlias = Literal["ghost", "straddle", "greedy"]

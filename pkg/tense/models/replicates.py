"""
Seeded replicate outputs standing in for an ensemble of model realisations.
"""
import numpy as np

from tense.models.functions import evaluate
from tense.types import Array, PointLike, PointsLike


def synthetic_replicates(
    name: str,
    x: PointLike,
    R: int,
    noise_sd: float,
    seed: int | None = None,
) -> Array:
    """R values f(x) + N(0, noise_sd^2), deterministic for a given seed."""
    return replicate_matrix(name, [x], R, noise_sd, seed)[0]


def replicate_matrix(
    name: str,
    points: PointsLike,
    R: int,
    noise_sd: float,
    seed: int | None = None,
) -> Array:
    """Replicates at many points, shape (n, R)."""
    if R < 1:
        raise ValueError(f"R must be at least 1, got {R}")
    if noise_sd < 0:
        raise ValueError(f"noise_sd must be nonnegative, got {noise_sd}")
    values = evaluate(name, points)
    rng = np.random.default_rng(seed)
    noise = rng.standard_normal((len(values), R)) * noise_sd
    return values[:, None] + noise

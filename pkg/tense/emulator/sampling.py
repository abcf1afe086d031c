import logging

import numpy as np
from scipy import linalg

from tense import DEFAULTS
from tense.emulator.adjust import AdjustedEmulator, joint_adjusted_cov
from tense.errors import JitterExhaustedError
from tense.types import Array, PointsLike
import tense.tooling as tooling


logger = logging.getLogger(__name__)


@tooling.inject_defaults(DEFAULTS['sampling'])
def jittered_cholesky(
    cov: Array,
    scale: float,
    *,
    jitter_start: float | None = None,
    jitter_max: float | None = None,
    jitter_factor: float | None = None,
) -> tuple[Array, float]:
    """
    Lower Cholesky factor of cov, adding jitter * scale to the diagonal when
    needed. The jitter ladder starts at ``jitter_start`` and grows by
    ``jitter_factor`` up to ``jitter_max``.
    """
    n = len(cov)
    jitter = 0.0
    while True:
        try:
            factor = linalg.cholesky(cov + jitter * scale * np.eye(n), lower=True)
            if jitter:
                logger.info("Sampling covariance of size %d needed jitter %.3g", n, jitter)
            return factor, jitter
        except linalg.LinAlgError:
            jitter = jitter_start if jitter == 0 else jitter * jitter_factor # type: ignore
            if jitter > jitter_max * (1 + 1e-12): # type: ignore
                raise JitterExhaustedError(
                    f"Covariance of size {n} stayed indefinite with jitter up to "
                    f"{jitter_max:g} of the prior variance"
                )


def sample_realizations(
    em: AdjustedEmulator,
    grid: PointsLike,
    count: int,
    seed: int | None = None,
) -> Array:
    """
    Draws from the adjusted joint distribution over the grid.

    Returns
    -------
    ndarray
        Samples of shape (len(grid), count); column j is realisation j.
    """
    if count < 1:
        raise ValueError(f"count must be at least 1, got {count}")
    means, cov = joint_adjusted_cov(em, grid)
    if len(means) == 0:
        return np.empty((0, count))
    factor, _ = jittered_cholesky(cov, em.prior.sigma ** 2)
    rng = np.random.default_rng(seed)
    z = rng.standard_normal((len(means), count))
    return means[:, None] + factor @ z


def probe_pairs(probes: PointsLike, eps: float) -> Array:
    """Points eps above and eps below each probe, as rows upper_0, lower_0, upper_1, ..."""
    if not eps > 0:
        raise ValueError(f"eps must be positive, got {eps}")
    pts = tooling.as_points(probes)
    out = np.repeat(pts, 2, axis=0)
    out[0::2, 1] += eps
    out[1::2, 1] -= eps
    return out


def jump_statistics(probes: PointsLike, pair_samples: Array) -> dict:
    """
    Summary of sampled jumps across the probes.

    ``pair_samples`` holds draws at ``probe_pairs(probes, eps)``. The jump at
    a probe is the upper minus the lower value; ``dominance[i][j]`` is the
    fraction of draws where |jump_i| exceeds |jump_j|.
    """
    pts = tooling.as_points(probes)
    pair_samples = np.asarray(pair_samples, dtype=float)
    if pair_samples.shape[0] != 2 * len(pts):
        raise ValueError(f"Expected {2 * len(pts)} sample rows for {len(pts)} probes, got {pair_samples.shape[0]}")
    jumps = np.abs(pair_samples[0::2] - pair_samples[1::2])
    dominance = (jumps[:, None, :] > jumps[None, :, :]).mean(axis=2)
    return {
        'draws': int(pair_samples.shape[1]),
        'probes': [
            {'x': float(x), 'y': float(y), 'mean_abs_jump': float(j.mean()), 'max_abs_jump': float(j.max())}
            for (x, y), j in zip(pts, jumps)
        ],
        'dominance': dominance,
    }

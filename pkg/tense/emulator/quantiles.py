"""
Emulation of summaries of replicate outputs.

Each target series (an empirical quantile, the replicate mean or the
replicate SD at every design point) gets its own emulator. The kernel is
shared with the template; the prior mean and SD are the sample mean and SD
of the series.
"""
import logging

import numpy as np

from tense.emulator.adjust import AdjustedEmulator, PriorSpec, TrainingSet, build_emulator
from tense.emulator.likelihood import estimate_theta_mle
from tense.types import Array, PointsLike
import tense.tooling as tooling


logger = logging.getLogger(__name__)


def quantile_targets(replicate_values: Array, quantiles: list[float]) -> dict[float, Array]:
    """Empirical quantiles per point, linear interpolation between order statistics."""
    reps = np.asarray(replicate_values, dtype=float)
    if reps.ndim != 2 or reps.shape[1] < 2:
        raise ValueError(f"Need at least 2 replicates per point, got shape {reps.shape}")
    for q in quantiles:
        if not 0 < q < 1:
            raise ValueError(f"Quantiles must lie in (0, 1), got {q}")
    return {float(q): np.quantile(reps, q, axis=1, method='linear') for q in quantiles}


def quantile_emulate(
    prior_template: PriorSpec,
    points: PointsLike,
    replicate_values: Array,
    quantiles: list[float],
    *,
    include_mean: bool = True,
    include_sd: bool = True,
    refit: bool = False,
    theta_bounds: tuple[float, float] | None = None,
) -> dict[float | str, AdjustedEmulator]:
    """
    One emulator per requested quantile, plus ``'mean'`` and ``'sd'`` targets.

    Parameters
    ----------
    prior_template : PriorSpec
        Kernel and nugget shared by all emulators.
    points : array_like
        Design points of shape (n, 2).
    replicate_values : array_like
        Replicate outputs of shape (n, R) with R >= 2.
    quantiles : list of float
        Probabilities in (0, 1).
    refit : bool
        Re-estimate theta by maximum likelihood for every target.
    """
    pts = tooling.as_points(points)
    reps = np.asarray(replicate_values, dtype=float)
    if len(reps) != len(pts):
        raise ValueError(f"Got {len(reps)} replicate rows for {len(pts)} points")

    targets: dict[float | str, Array] = dict(quantile_targets(reps, quantiles))
    if include_mean:
        targets['mean'] = reps.mean(axis=1)
    if include_sd:
        targets['sd'] = reps.std(axis=1, ddof=1)

    out: dict[float | str, AdjustedEmulator] = {}
    for key, series in targets.items():
        sigma = float(series.std(ddof=1)) if len(series) > 1 else 0.0
        if not sigma > 0:
            sigma = prior_template.sigma
        prior = prior_template.with_moments(float(series.mean()), sigma)
        data = TrainingSet(pts, series)
        if refit:
            prior = prior.with_theta(estimate_theta_mle(prior, data, theta_bounds))
        logger.debug("Quantile target %s: mean %g, sd %g, theta %g", key, prior.mean, sigma, prior.theta)
        out[key] = build_emulator(prior, data)
    return out

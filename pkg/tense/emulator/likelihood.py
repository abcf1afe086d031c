"""
Maximum likelihood estimation of the correlation length.

With the mean fixed at the sample mean and the variance profiled out, the
Gaussian log-likelihood of the runs at correlation length theta is

    l(theta) = -n/2 log(s2) - 1/2 log|R|,  s2 = r^T R^-1 r / n,

where R is the correlation matrix of the runs (nugget included) and r the
centred run values.
"""
import logging
from dataclasses import dataclass, field

import numpy as np
import pandas as pd
from scipy import linalg, optimize

from tense import DEFAULTS
from tense.emulator import covariance as kern
from tense.emulator.adjust import PriorSpec, TrainingSet
from tense.errors import FactorizationError, NumericalError
import tense.tooling as tooling


logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class MleResult:
    theta: float
    loglik: float
    bounds: tuple[float, float]
    on_edge: bool
    profile: pd.DataFrame = field(compare=False)


def _likelihood_data(data: TrainingSet, include_ghosts: bool) -> TrainingSet:
    return data if include_ghosts else data.subset(~data.ghost_mask)


def profile_loglik(
    prior: PriorSpec,
    data: TrainingSet,
    theta: float,
) -> float:
    """
    Profiled log-likelihood at ``theta``; -inf when the correlation matrix
    cannot be factorized or the profiled variance vanishes.
    """
    cfg = DEFAULTS['emulator']
    trial = prior.with_theta(theta)
    feats = kern.features(trial.kernel, data.points)
    corr = kern.cov_matrix(trial.kernel, 1.0, feats)
    try:
        chol, _ = kern.factorize(
            corr, 1.0, prior.nugget, cfg['max_nugget'], cfg['escalation_start'], "R",
        )
    except FactorizationError:
        return -np.inf
    resid = data.values - data.values.mean()
    n = len(resid)
    s2 = float(resid @ linalg.cho_solve(chol, resid)) / n
    if not s2 > 0:
        return -np.inf
    logdet = 2 * np.log(np.diag(chol[0])).sum()
    return -0.5 * n * np.log(s2) - 0.5 * logdet


@tooling.inject_defaults(DEFAULTS['mle'])
def mle_search(
    prior_template: PriorSpec,
    data: TrainingSet,
    theta_bounds: tuple[float, float] | None = None,
    *,
    bounds: tuple[float, float] | None = None,
    grid_points: int | None = None,
    include_ghosts: bool | None = None,
) -> MleResult:
    """
    Coarse search on a log-theta grid followed by golden-section refinement
    around the best grid point. A maximum on the edge of the grid returns
    that edge.
    """
    lo, hi = theta_bounds if theta_bounds is not None else bounds # type: ignore
    if not 0 < lo < hi:
        raise ValueError(f"theta bounds must satisfy 0 < lo < hi, got ({lo}, {hi})")
    used = _likelihood_data(data, include_ghosts) # type: ignore
    if len(used) < 5:
        raise ValueError(f"Likelihood estimation needs at least 5 runs, got {len(used)}")

    log_grid = np.linspace(np.log(lo), np.log(hi), grid_points) # type: ignore
    values = np.array([profile_loglik(prior_template, used, np.exp(t)) for t in log_grid])
    profile = pd.DataFrame({'theta': np.exp(log_grid), 'loglik': values})
    finite = np.isfinite(values)
    if not finite.any():
        raise NumericalError(
            f"Log-likelihood is not finite anywhere in theta bracket [{lo:g}, {hi:g}]"
        )

    best = int(np.argmax(np.where(finite, values, -np.inf)))
    if best in (0, len(log_grid) - 1):
        theta = float(np.exp(log_grid[best]))
        logger.info("Likelihood maximum on the edge of [%g, %g]: theta=%g", lo, hi, theta)
        return MleResult(theta, float(values[best]), (lo, hi), True, profile)

    def negative(t: float) -> float:
        value = profile_loglik(prior_template, used, float(np.exp(t)))
        return -value if np.isfinite(value) else np.inf

    bracket = (log_grid[best - 1], log_grid[best], log_grid[best + 1])
    try:
        result = optimize.minimize_scalar(negative, bracket=bracket, method='golden')
        t_hat = float(np.clip(result.x, log_grid[best - 1], log_grid[best + 1]))
    except ValueError:
        # flat neighbourhood, no strict bracket
        t_hat = float(log_grid[best])
    theta, loglik = float(np.exp(t_hat)), -float(negative(t_hat))
    if loglik < values[best]:
        theta, loglik = float(np.exp(log_grid[best])), float(values[best])
    logger.info("Maximum likelihood theta=%g (loglik %.6g) in [%g, %g]", theta, loglik, lo, hi)
    return MleResult(theta, loglik, (lo, hi), False, profile)


def estimate_theta_mle(
    prior_template: PriorSpec,
    data: TrainingSet,
    theta_bounds: tuple[float, float] | None = None,
    **kwargs,
) -> float:
    """Maximum likelihood correlation length; see ``mle_search``."""
    return mle_search(prior_template, data, theta_bounds, **kwargs).theta

"""
Bayes linear adjustment of a constant-mean prior by training runs.

    E_D[f(x)]   = m + Cov(f(x), D) Var(D)^-1 (D - m)
    Var_D[f(x)] = sigma^2 - Cov(f(x), D) Var(D)^-1 Cov(D, f(x))

Var(D) carries a nugget of ``nugget * sigma^2`` on its diagonal.
"""
import logging
import warnings
from dataclasses import dataclass, field, replace
from typing import Iterable

import numpy as np
import pandas as pd
from scipy import linalg

from tense import DEFAULTS
from tense.config.service import MAX_NUGGET_FRACTION
from tense.covkernel import KernelSpec
from tense.emulator import covariance as kern
from tense.errors import VarianceClampWarning
from tense.nscov import NsCovSpec
from tense.types import Array, KernelMode, PointLike, PointsLike
import tense.tooling as tooling


logger = logging.getLogger(__name__)

GHOST = "ghost"


# region prior
@dataclass(frozen=True, eq=False)
class PriorSpec:
    mean: float
    sigma: float
    kernel: kern.Kernel
    nugget: float = field(default_factory=lambda: DEFAULTS['emulator']['nugget'])

    def __post_init__(self):
        if not self.sigma > 0:
            raise ValueError(f"sigma must be positive, got {self.sigma}")
        if not 0 <= self.nugget <= MAX_NUGGET_FRACTION:
            raise ValueError(f"nugget must lie in [0, {MAX_NUGGET_FRACTION}], got {self.nugget}")
        if not isinstance(self.kernel, (KernelSpec, NsCovSpec)):
            raise TypeError(f"Unsupported kernel type {type(self.kernel).__name__}")

    @property
    def kernel_mode(self) -> KernelMode:
        return "tense" if isinstance(self.kernel, NsCovSpec) else "stationary"

    @property
    def theta(self) -> float:
        return self.kernel.theta

    def with_theta(self, theta: float) -> 'PriorSpec':
        if isinstance(self.kernel, NsCovSpec):
            return replace(self, kernel=replace(self.kernel, theta=theta))
        return replace(self, kernel=self.kernel.with_theta(theta))

    def with_moments(self, mean: float, sigma: float) -> 'PriorSpec':
        return replace(self, mean=float(mean), sigma=float(sigma))


# region training data
@dataclass(frozen=True, eq=False)
class TrainingSet:
    points: Array
    values: Array
    labels: tuple[str, ...] = ()

    def __post_init__(self):
        pts = tooling.as_points(self.points)
        values = np.asarray(self.values, dtype=float).ravel()
        labels = tuple(self.labels) if len(self.labels) else ("",) * len(pts)
        if not len(pts) == len(values) == len(labels):
            raise ValueError(
                f"points, values and labels must have equal length, got "
                f"{len(pts)}, {len(values)} and {len(labels)}"
            )
        if len(pts) and len(np.unique(pts, axis=0)) != len(pts):
            raise ValueError("Training points contain exact duplicates")
        object.__setattr__(self, 'points', pts)
        object.__setattr__(self, 'values', values)
        object.__setattr__(self, 'labels', labels)

    def __len__(self) -> int:
        return len(self.points)

    @classmethod
    def empty(cls) -> 'TrainingSet':
        return cls(np.empty((0, 2)), np.empty(0))

    @classmethod
    def from_frame(cls, df: pd.DataFrame, value: str = 'value', label: str = 'label') -> 'TrainingSet':
        labels = tuple(df[label].fillna('').astype(str)) if label in df else ()
        return cls(df[['x', 'y']].to_numpy(float), df[value].to_numpy(float), labels)

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame({
            'x': self.points[:, 0],
            'y': self.points[:, 1],
            'value': self.values,
            'label': list(self.labels),
        })

    @property
    def ghost_mask(self) -> np.ndarray:
        return np.array([label == GHOST for label in self.labels], dtype=bool)

    def subset(self, idx: Iterable[int] | np.ndarray) -> 'TrainingSet':
        idx = np.asarray(idx)
        if idx.dtype == bool:
            idx = np.flatnonzero(idx)
        return TrainingSet(
            self.points[idx],
            self.values[idx],
            tuple(self.labels[i] for i in idx),
        )

    def without(self, i: int) -> 'TrainingSet':
        return self.subset(np.delete(np.arange(len(self)), i))

    def concat(self, other: 'TrainingSet') -> 'TrainingSet':
        return TrainingSet(
            np.vstack([self.points, other.points]),
            np.concatenate([self.values, other.values]),
            self.labels + other.labels,
        )


# region emulator
@dataclass(frozen=True, eq=False)
class AdjustedEmulator:
    prior: PriorSpec
    data: TrainingSet
    features: kern.Features | None
    chol: tuple[Array, bool] | None
    weights: Array
    nugget: float

    @property
    def is_prior_only(self) -> bool:
        return self.chol is None

    def data_cov(self, query: kern.Features) -> Array:
        """Cov(D, f(P)) of shape (n, m)."""
        return kern.cross_cov(self.prior.kernel, self.prior.sigma, self.features, query)

    def solve(self, rhs: Array) -> Array:
        return linalg.cho_solve(self.chol, rhs) # type: ignore


@dataclass(frozen=True)
class Prediction:
    mean: Array
    var: Array
    clamped: int = 0

    @property
    def sd(self) -> Array:
        return np.sqrt(self.var)

    def to_frame(self, points: PointsLike) -> pd.DataFrame:
        pts = tooling.as_points(points)
        return pd.DataFrame({
            'x': pts[:, 0],
            'y': pts[:, 1],
            'mean': self.mean,
            'sd': self.sd,
        })


@tooling.inject_defaults(DEFAULTS['emulator'])
def build_emulator(
    prior: PriorSpec,
    data: TrainingSet,
    *,
    max_nugget: float | None = None,
    escalation_start: float | None = None,
) -> AdjustedEmulator:
    """
    Adjust the prior by the training runs.

    Var(D) is factorized with the prior nugget; when the Cholesky
    factorization fails the nugget grows tenfold per attempt up to
    ``max_nugget``, after which FactorizationError is raised.
    """
    if len(data) == 0:
        return AdjustedEmulator(prior, data, None, None, np.empty(0), prior.nugget)

    feats = kern.features(prior.kernel, data.points)
    cov = kern.cov_matrix(prior.kernel, prior.sigma, feats)
    chol, used = kern.factorize(
        cov,
        prior.sigma ** 2,
        prior.nugget,
        max_nugget, # type: ignore
        escalation_start, # type: ignore
    )
    weights = linalg.cho_solve(chol, data.values - prior.mean)
    logger.debug(
        "Built %s emulator on %d runs (theta=%g, nugget=%g)",
        prior.kernel_mode, len(data), prior.theta, used,
    )
    return AdjustedEmulator(prior, data, feats, chol, weights, used)


def _moments_chunk(em: AdjustedEmulator, chunk: Array) -> tuple[Array, Array]:
    prior = em.prior
    query = kern.features(prior.kernel, chunk)
    if em.is_prior_only:
        return np.full(len(chunk), prior.mean), np.full(len(chunk), prior.sigma ** 2)
    kq = em.data_cov(query)
    mean = prior.mean + kq.T @ em.weights
    var = prior.sigma ** 2 - np.einsum('ij,ij->j', kq, em.solve(kq))
    return mean, var


@tooling.inject_defaults(DEFAULTS['emulator'])
def predict(
    em: AdjustedEmulator,
    points: PointsLike,
    *,
    chunk_size: int | None = None,
    clamp_warning_fraction: float | None = None,
) -> Prediction:
    """
    Adjusted means and variances at many points.

    Negative variances from round-off are set to zero and counted; when
    more than ``clamp_warning_fraction`` of the points are clamped a
    VarianceClampWarning is issued.
    """
    pts = tooling.as_points(points)
    if len(pts) == 0:
        return Prediction(np.empty(0), np.empty(0))
    parts = tooling.map_chunks(lambda c: _moments_chunk(em, c), pts, chunk_size) # type: ignore
    mean = np.concatenate([m for m, _ in parts])
    var = np.concatenate([v for _, v in parts])

    negative = var < 0
    clamped = int(negative.sum())
    var[negative] = 0.0
    if clamped:
        logger.debug("Clamped %d of %d adjusted variances at zero", clamped, len(var))
        if clamped > clamp_warning_fraction * len(var): # type: ignore
            message = f"{clamped} of {len(var)} adjusted variances were negative and set to zero"
            logger.warning(message)
            warnings.warn(message, VarianceClampWarning, stacklevel=2)
    return Prediction(mean, var, clamped)


def adjusted_moments(em: AdjustedEmulator, x: PointLike) -> tuple[float, float]:
    """Adjusted mean and variance at a single point."""
    pred = predict(em, [x])
    return float(pred.mean[0]), float(pred.var[0])


def joint_adjusted_cov(em: AdjustedEmulator, points: PointsLike) -> tuple[Array, Array]:
    """
    Adjusted means and the full adjusted covariance over a point set.

    Var(f(P)) - Cov(f(P), D) Var(D)^-1 Cov(D, f(P)), symmetrised.
    """
    prior = em.prior
    query = kern.features(prior.kernel, points)
    cov = kern.cov_matrix(prior.kernel, prior.sigma, query)
    m = len(cov)
    if em.is_prior_only:
        return np.full(m, prior.mean), cov
    kq = em.data_cov(query)
    means = prior.mean + kq.T @ em.weights
    cov = cov - kq.T @ em.solve(kq)
    return means, (cov + cov.T) / 2

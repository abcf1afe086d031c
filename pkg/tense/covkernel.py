"""
Stationary correlation functions and Mahalanobis distances.

The squared exponential form is r(dx) = exp(-dx^T M^-1 dx) for a symmetric
positive-definite metric M; the isotropic metric is theta^2 * I. The Matern
family uses the Euclidean norm of dx scaled by theta.
"""
from dataclasses import dataclass, field, replace

import numpy as np
from scipy import linalg, special

from tense import DEFAULTS
from tense.errors import FactorizationError
from tense.types import Array, KernelFamily, PointsLike
import tense.tooling as tooling


FAMILIES = ("squared_exponential", "matern")


# region spec
@dataclass(frozen=True)
class KernelSpec:
    family: KernelFamily = "squared_exponential"
    theta: float = 1.0
    nu: float = 2.5
    metric: Array | None = field(default=None, compare=False)
    dim: int = 2

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValueError(f"Unknown kernel family '{self.family}', expected one of {FAMILIES}")
        if not self.theta > 0:
            raise ValueError(f"theta must be positive, got {self.theta}")
        if self.family == "matern" and not self.nu > 0:
            raise ValueError(f"nu must be positive for the Matern family, got {self.nu}")

        if self.metric is None:
            metric = self.theta ** 2 * np.eye(self.dim)
        else:
            metric = np.array(self.metric, dtype=float)
        validate_metric(metric)
        object.__setattr__(self, 'metric', metric)
        object.__setattr__(self, 'dim', metric.shape[0])

    @classmethod
    @tooling.inject_defaults(DEFAULTS['kernel'])
    def isotropic(
        cls,
        theta: float,
        dim: int = 2,
        *,
        family: KernelFamily | None = None,
        nu: float | None = None,
    ) -> 'KernelSpec':
        return cls(family=family, theta=theta, nu=nu, dim=dim) # type: ignore

    def with_theta(self, theta: float) -> 'KernelSpec':
        """Copy with a new correlation length; the metric scales with theta^2."""
        scaled = self.metric * (theta / self.theta) ** 2 # type: ignore
        return replace(self, theta=theta, metric=scaled)


def validate_metric(metric: Array) -> None:
    if metric.ndim != 2 or metric.shape[0] != metric.shape[1]:
        raise ValueError(f"Metric must be a square matrix, got shape {metric.shape}")
    if not np.allclose(metric, metric.T, rtol=1e-12, atol=1e-14):
        raise ValueError("Metric must be symmetric")
    if np.linalg.eigvalsh(metric).min() <= 0:
        raise ValueError("Metric must have strictly positive eigenvalues")


# region distances
def _factor(metric: Array):
    try:
        return linalg.cho_factor(metric, lower=True)
    except linalg.LinAlgError as err:
        raise FactorizationError(f"Metric is not positive definite: {err}") from err


def mahalanobis_sq(dx: PointsLike, metric: PointsLike) -> float | Array:
    """
    Squared Mahalanobis length dx^T metric^-1 dx via a Cholesky solve.

    Parameters
    ----------
    dx : array_like
        A single difference vector of shape (d,) or a stack of shape (n, d).
    metric : array_like
        Symmetric positive-definite (d, d) matrix.

    Returns
    -------
    float or ndarray
        Scalar for a single vector, else an array of shape (n,).
    """
    metric = np.asarray(metric, dtype=float)
    dx = np.asarray(dx, dtype=float)
    single = dx.ndim == 1
    diffs = np.atleast_2d(dx)
    if diffs.shape[-1] != metric.shape[0]:
        raise ValueError(
            f"Difference vectors of dimension {diffs.shape[-1]} do not match "
            f"metric of dimension {metric.shape[0]}"
        )
    factor = _factor(metric)
    solved = linalg.cho_solve(factor, diffs.T).T
    result = np.maximum(np.einsum('ij,ij->i', diffs, solved), 0.0)
    return float(result[0]) if single else result


# region correlation
def _matern(distance: Array, theta: float, nu: float) -> Array:
    scaled = np.sqrt(2 * nu) * distance / theta
    out = np.ones_like(scaled)
    nonzero = scaled > 0
    z = scaled[nonzero]
    if np.isclose(nu, 0.5):
        out[nonzero] = np.exp(-z)
    elif np.isclose(nu, 1.5):
        out[nonzero] = (1 + z) * np.exp(-z)
    elif np.isclose(nu, 2.5):
        out[nonzero] = (1 + z + z ** 2 / 3) * np.exp(-z)
    else:
        coef = 2 ** (1 - nu) / special.gamma(nu)
        with np.errstate(over='ignore', invalid='ignore'):
            values = coef * z ** nu * special.kv(nu, z)
        out[nonzero] = np.nan_to_num(values, nan=0.0, posinf=0.0)
    return out


def _correlation_from_diffs(spec: KernelSpec, diffs: Array) -> Array:
    """Correlation for a stack of difference vectors of shape (..., d)."""
    shape = diffs.shape[:-1]
    flat = diffs.reshape(-1, diffs.shape[-1])
    if spec.family == "squared_exponential":
        values = np.exp(-mahalanobis_sq(flat, spec.metric)) if len(flat) else np.empty(0) # type: ignore
    else:
        values = _matern(np.linalg.norm(flat, axis=1), spec.theta, spec.nu)
    return np.asarray(values).reshape(shape)


def stationary_correlation(spec: KernelSpec, dx: PointsLike) -> float | Array:
    """
    Stationary correlation r(dx) for one or several difference vectors.

    Squared exponential: exp(-mahalanobis_sq(dx, metric)). Matern: the Bessel
    form at ||dx|| with length theta, using closed forms for nu in
    {1/2, 3/2, 5/2}. Zero differences give exactly 1.
    """
    dx = np.asarray(dx, dtype=float)
    if dx.ndim == 1:
        return float(_correlation_from_diffs(spec, dx[None, :])[0])
    return _correlation_from_diffs(spec, dx)


def stationary_cross_cov(
    spec: KernelSpec,
    sigma: float,
    points_a: PointsLike,
    points_b: PointsLike,
) -> Array:
    """Covariance block sigma^2 r(a_i - b_j) of shape (len(a), len(b))."""
    a = tooling.as_points(points_a, spec.dim)
    b = tooling.as_points(points_b, spec.dim)
    if len(a) == 0 or len(b) == 0:
        return np.zeros((len(a), len(b)))
    diffs = a[:, None, :] - b[None, :, :]
    return sigma ** 2 * _correlation_from_diffs(spec, diffs)


def stationary_cov_matrix(spec: KernelSpec, sigma: float, points: PointsLike) -> Array:
    """Symmetric covariance matrix with diagonal sigma^2."""
    pts = tooling.as_points(points, spec.dim)
    cov = stationary_cross_cov(spec, sigma, pts, pts)
    cov = (cov + cov.T) / 2
    np.fill_diagonal(cov, sigma ** 2)
    return cov

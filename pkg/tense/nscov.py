"""
Non-stationary squared exponential covariance on a torn embedding.

For points with locations u_i, u_j and local metrics S_i, S_j

    k(i, j) = sigma^2 |S_i|^(1/4) |S_j|^(1/4) |M|^(-1/2) exp(-Q),
    M = (S_i + S_j) / 2,  Q = (u_i - u_j)^T M^-1 (u_i - u_j),

which is positive semi-definite for any field of SPD metrics. With the
embedded 3-D locations and the local metrics of the surface this is the
torn covariance; with 2-D locations and theta^2 I everywhere it is the
stationary squared exponential.
"""
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from scipy import linalg

from tense import DEFAULTS
from tense.embedding.metric import local_metrics
from tense.embedding.surface import EmbeddingSurface, embed_points
from tense.errors import FactorizationError
from tense.types import Array, PointLike, PointsLike
import tense.tooling as tooling


# pairs per block when assembling rectangular covariances
PAIR_BLOCK = 250_000


# region spec
@dataclass(frozen=True, eq=False)
class NsCovSpec:
    sigma: float
    theta: float
    alpha3: float
    surface: EmbeddingSurface
    dim: int = 3

    def __post_init__(self):
        for name in ('sigma', 'theta', 'alpha3'):
            value = getattr(self, name)
            if not value > 0:
                raise ValueError(f"{name} must be positive, got {value}")
        if self.dim not in (2, 3):
            raise ValueError(f"dim must be 2 or 3, got {self.dim}")


class NsFeatures(NamedTuple):
    """Locations and local metrics of a prepared point set."""
    locations: Array
    metrics: Array

    def __len__(self) -> int:
        return len(self.locations)

    def take(self, idx) -> 'NsFeatures':
        return NsFeatures(self.locations[idx], self.metrics[idx])


def ns_features(spec: NsCovSpec, points: PointsLike) -> NsFeatures:
    """Embedded locations and local metrics for the points, ready for reuse."""
    pts = spec.surface.prepare(points)
    if spec.dim == 2:
        metrics = np.broadcast_to(spec.theta ** 2 * np.eye(2), (len(pts), 2, 2)).copy()
        return NsFeatures(pts, metrics)
    return NsFeatures(
        embed_points(spec.surface, pts),
        local_metrics(spec.surface, pts, spec.theta, spec.alpha3),
    )


# region kernel
def _cholesky(stack: Array) -> Array:
    try:
        return np.linalg.cholesky(stack)
    except np.linalg.LinAlgError as err:
        raise FactorizationError(f"Averaged local metric is not positive definite: {err}") from err


def _forward_quadratic(chol: Array, diff: Array) -> Array:
    """|L^-1 d|^2 for stacks of lower triangular L and vectors d."""
    dim = diff.shape[-1]
    solved = np.empty_like(diff)
    for i in range(dim):
        acc = diff[..., i] - np.einsum('...j,...j->...', chol[..., i, :i], solved[..., :i])
        solved[..., i] = acc / chol[..., i, i]
    return np.einsum('...i,...i->...', solved, solved)


def _logdet(chol: Array) -> Array:
    return 2 * np.log(np.diagonal(chol, axis1=-2, axis2=-1)).sum(axis=-1)


def paciorek_terms(
    loc_a: Array,
    met_a: Array,
    loc_b: Array,
    met_b: Array,
) -> tuple[Array, Array]:
    """
    Quadratic form and log prefactor for all pairs, each of shape (na, nb).
    """
    logdet_a = _logdet(_cholesky(met_a))
    logdet_b = _logdet(_cholesky(met_b))
    averaged = (met_a[:, None] + met_b[None, :]) / 2
    chol = _cholesky(averaged)
    diff = loc_a[:, None, :] - loc_b[None, :, :]
    quad = _forward_quadratic(chol, diff)
    log_prefactor = (
        logdet_a[:, None] / 4 + logdet_b[None, :] / 4 - _logdet(chol) / 2
    )
    return np.maximum(quad, 0.0), np.minimum(log_prefactor, 0.0)


def paciorek_cov(
    loc_a: PointsLike,
    met_a: Array,
    loc_b: PointsLike,
    met_b: Array,
    sigma: float,
) -> Array:
    """
    Non-stationary squared exponential covariance block between two point
    sets with per-point SPD metrics, in any dimension.

    Parameters
    ----------
    loc_a, loc_b : array_like
        Locations of shape (na, d) and (nb, d).
    met_a, met_b : ndarray
        Metrics of shape (na, d, d) and (nb, d, d).
    sigma : float
        Prior standard deviation.

    Returns
    -------
    ndarray
        Covariances of shape (na, nb).
    """
    met_a = np.asarray(met_a, dtype=float)
    met_b = np.asarray(met_b, dtype=float)
    dim = met_a.shape[-1] if met_a.ndim == 3 else met_b.shape[-1]
    a = tooling.as_points(loc_a, dim)
    b = tooling.as_points(loc_b, dim)
    out = np.zeros((len(a), len(b)))
    if len(a) == 0 or len(b) == 0:
        return out
    rows = max(1, PAIR_BLOCK // len(b))
    for start in range(0, len(a), rows):
        stop = start + rows
        quad, log_pref = paciorek_terms(a[start:stop], met_a[start:stop], b, met_b)
        out[start:stop] = sigma ** 2 * np.exp(log_pref - quad)
    return out


# region spec level
def ns_cross_features(spec: NsCovSpec, fa: NsFeatures, fb: NsFeatures) -> Array:
    return paciorek_cov(fa.locations, fa.metrics, fb.locations, fb.metrics, spec.sigma)


def ns_quadratic_form(spec: NsCovSpec, x: PointLike, x_prime: PointLike) -> float:
    """Q for a single pair of 2-D points."""
    f = ns_features(spec, [x, x_prime])
    quad, _ = paciorek_terms(
        f.locations[:1], f.metrics[:1], f.locations[1:], f.metrics[1:]
    )
    return float(quad[0, 0])


def ns_covariance(spec: NsCovSpec, x: PointLike, x_prime: PointLike) -> float:
    f = ns_features(spec, [x, x_prime])
    return float(ns_cross_features(spec, f.take(slice(0, 1)), f.take(slice(1, 2)))[0, 0])


def ns_cross_cov(spec: NsCovSpec, points_a: PointsLike, points_b: PointsLike) -> Array:
    """Rectangular covariance block between two 2-D point sets."""
    return ns_cross_features(spec, ns_features(spec, points_a), ns_features(spec, points_b))


def symmetric_cov(spec: NsCovSpec, features: NsFeatures) -> Array:
    cov = ns_cross_features(spec, features, features)
    cov = (cov + cov.T) / 2
    np.fill_diagonal(cov, spec.sigma ** 2)
    return cov


def assemble_cov_matrix(spec: NsCovSpec, points: PointsLike) -> Array:
    """Symmetric n x n covariance with diagonal sigma^2."""
    return symmetric_cov(spec, ns_features(spec, points))


def correlation_matrix(cov: Array) -> Array:
    sd = np.sqrt(np.diag(cov))
    return cov / np.outer(sd, sd)


# region checks
@tooling.inject_defaults(DEFAULTS['nscov'])
def min_eigenvalue_check(
    matrix: PointsLike,
    *,
    psd_tolerance: float | None = None,
) -> tuple[float, bool]:
    """
    Smallest eigenvalue and PSD verdict.

    The matrix counts as PSD when its smallest eigenvalue is at least
    ``-psd_tolerance * n * max|entry|``.
    """
    mat = np.asarray(matrix, dtype=float)
    if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
        raise ValueError(f"Expected a square matrix, got shape {mat.shape}")
    if len(mat) == 0:
        return 0.0, True
    scale = float(np.abs(mat).max())
    if not np.allclose(mat, mat.T, rtol=1e-10, atol=1e-12 * max(scale, 1.0)):
        raise ValueError("Matrix is not symmetric")
    min_eig = float(linalg.eigvalsh(mat, subset_by_index=[0, 0])[0])
    threshold = -psd_tolerance * len(mat) * scale # type: ignore
    return min_eig, min_eig >= threshold


# region geodesic example
GEODESIC_LABELS = ("A", "B", "C", "D")
# C sits just above and D just below the toy-1 tear, which ends at B; they
# share a location but the path from C to D has to go round B
GEODESIC_POINTS = np.array([[0.5, 1.0], [0.75, 1.0], [1.0, 1.0], [1.0, 1.0]])
GEODESIC_DISTANCES = np.array([
    [0.0, 0.25, 0.5, 0.5],
    [0.25, 0.0, 0.25, 0.25],
    [0.5, 0.25, 0.0, 0.5],
    [0.5, 0.25, 0.5, 0.0],
])


def geodesic_threshold() -> float:
    """Correlation length above which the geodesic matrix is indefinite."""
    return 0.25 / np.sqrt(0.5 * np.log(2))


def geodesic_counterexample(theta: float) -> tuple[Array, float]:
    """
    Squared exponential correlations exp(-d^2 / theta^2) of four points
    around the end of a tear, with d the distance along paths that avoid
    the tear. The matrix is not positive semi-definite for theta above
    ``geodesic_threshold``.
    """
    if not theta > 0:
        raise ValueError(f"theta must be positive, got {theta}")
    matrix = np.exp(-GEODESIC_DISTANCES ** 2 / theta ** 2)
    min_eig = float(linalg.eigvalsh(matrix)[0])
    return matrix, min_eig

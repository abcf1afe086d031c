"""
Local 3-D metrics that undo the stretching of an embedding surface.

At a point with surface gradient (v_x, v_y) the tangent plane is spanned by
w1 (uphill) and w2 (level); w3 is the normal. Giving w1 the eigenvalue
theta^2 (1 + r^2) and w2 the eigenvalue theta^2, with r^2 = v_x^2 + v_y^2,
makes the metric restricted to the surface equal the isotropic 2-D metric
theta^2 I. The normal eigenvalue alpha3^2 only governs how fast correlation
falls off across a tear.
"""
from dataclasses import dataclass

import numpy as np

from tense import DEFAULTS
from tense.embedding.surface import EmbeddingSurface, surface_gradients
from tense.types import Array, PointLike, PointsLike
import tense.tooling as tooling


@dataclass(frozen=True)
class LocalMetric:
    sigma3d: Array
    basis: tuple[Array, Array, Array]
    eigs: Array
    grad: Array
    r_sq: float

    @property
    def projection(self) -> Array:
        """The 3x2 tangent map A = [[1, 0], [0, 1], [v_x, v_y]]."""
        return tangent_map(self.grad)


def tangent_map(grad: PointLike) -> Array:
    vx, vy = np.asarray(grad, dtype=float)
    return np.array([[1.0, 0.0], [0.0, 1.0], [vx, vy]])


@tooling.inject_defaults(DEFAULTS['embedding'])
def tangent_basis(
    grad: PointLike,
    *,
    degenerate_threshold: float | None = None,
) -> tuple[Array, Array, Array]:
    """
    Orthonormal basis (w1, w2, w3) adapted to the surface gradient.

    w1 = (v_x, v_y, r^2) / c1, w2 = (-v_y, v_x, 0) / c2 and
    w3 = (-v_x, -v_y, 1) / c3. Below ``degenerate_threshold`` for r^2 the
    canonical basis is returned.
    """
    vx, vy = np.asarray(grad, dtype=float)
    r_sq = vx ** 2 + vy ** 2
    if r_sq < degenerate_threshold: # type: ignore
        return tuple(np.eye(3)) # type: ignore
    r = np.sqrt(r_sq)
    w1 = np.array([vx, vy, r_sq]) / (r * np.sqrt(1 + r_sq))
    w2 = np.array([-vy, vx, 0.0]) / r
    w3 = np.array([-vx, -vy, 1.0]) / np.sqrt(1 + r_sq)
    return w1, w2, w3


def sigma3d_closed_form(grads: PointsLike, theta: float, alpha3: float) -> Array:
    """
    Local metrics for a stack of gradients, shape (n, 3, 3).

    The closed form is regular at r = 0, where it reduces to
    diag(theta^2, theta^2, alpha3^2).
    """
    g = tooling.as_points(grads)
    vx, vy = g[:, 0], g[:, 1]
    r_sq = vx ** 2 + vy ** 2
    t2, a2 = theta ** 2, alpha3 ** 2
    normal = a2 / (1 + r_sq)

    out = np.empty((len(g), 3, 3))
    out[:, 0, 0] = t2 + normal * vx ** 2
    out[:, 1, 1] = t2 + normal * vy ** 2
    out[:, 2, 2] = t2 * r_sq + normal
    out[:, 0, 1] = out[:, 1, 0] = normal * vx * vy
    out[:, 0, 2] = out[:, 2, 0] = vx * (t2 - normal)
    out[:, 1, 2] = out[:, 2, 1] = vy * (t2 - normal)
    return out


def metric_eigenvalues(r_sq: float | Array, theta: float, alpha3: float) -> Array:
    """Eigenvalues (theta^2 (1 + r^2), theta^2, alpha3^2) matching w1, w2, w3."""
    r_sq = np.asarray(r_sq, dtype=float)
    return np.stack(
        np.broadcast_arrays(theta ** 2 * (1 + r_sq), theta ** 2, alpha3 ** 2),
        axis=-1,
    )


def metric_from_gradient(grad: PointLike, theta: float, alpha3: float) -> LocalMetric:
    if not theta > 0 or not alpha3 > 0:
        raise ValueError(f"theta and alpha3 must be positive, got {theta} and {alpha3}")
    g = np.asarray(grad, dtype=float)
    r_sq = float(g @ g)
    return LocalMetric(
        sigma3d=sigma3d_closed_form(g[None, :], theta, alpha3)[0],
        basis=tangent_basis(g),
        eigs=metric_eigenvalues(r_sq, theta, alpha3),
        grad=g,
        r_sq=r_sq,
    )


def local_metric(
    surface: EmbeddingSurface,
    x: PointLike,
    theta: float,
    alpha3: float,
) -> LocalMetric:
    grad = surface_gradients(surface, [x])[0]
    return metric_from_gradient(grad, theta, alpha3)


def local_metrics(
    surface: EmbeddingSurface,
    points: PointsLike,
    theta: float,
    alpha3: float,
) -> Array:
    """Stack of local metrics at many points, shape (n, 3, 3)."""
    if not theta > 0 or not alpha3 > 0:
        raise ValueError(f"theta and alpha3 must be positive, got {theta} and {alpha3}")
    return sigma3d_closed_form(surface_gradients(surface, points), theta, alpha3)

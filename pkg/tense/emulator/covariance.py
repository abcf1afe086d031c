"""
Kernel dispatch shared by the emulator and the design code.

A kernel is either a stationary ``KernelSpec`` working on raw 2-D inputs or
an ``NsCovSpec`` working on embedded locations with local metrics. Points
are turned into features once and reused for every covariance block.
"""
import logging
from dataclasses import replace
from functools import singledispatch
from typing import TypeAlias

import numpy as np
from scipy import linalg

from tense.covkernel import KernelSpec, stationary_cross_cov
from tense.errors import FactorizationError
from tense.nscov import NsCovSpec, NsFeatures, ns_cross_features, ns_features
from tense.types import Array, PointsLike
import tense.tooling as tooling


logger = logging.getLogger(__name__)


Kernel: TypeAlias = KernelSpec | NsCovSpec
Features: TypeAlias = Array | NsFeatures


# region features
@singledispatch
def features(kernel, points: PointsLike) -> Features:
    raise TypeError(f"Unsupported kernel type {type(kernel).__name__}")


@features.register
def _(kernel: KernelSpec, points: PointsLike) -> Features:
    return tooling.as_points(points, kernel.dim)


@features.register
def _(kernel: NsCovSpec, points: PointsLike) -> Features:
    return ns_features(kernel, points)


@singledispatch
def take(feats, idx) -> Features:
    raise TypeError(f"Unsupported features type {type(feats).__name__}")


@take.register
def _(feats: np.ndarray, idx) -> Features:
    return feats[idx]


@take.register
def _(feats: NsFeatures, idx) -> Features:
    return feats.take(idx)


def concat(first: Features, second: Features) -> Features:
    if isinstance(first, NsFeatures):
        return NsFeatures(
            np.concatenate([first.locations, second.locations]), # type: ignore
            np.concatenate([first.metrics, second.metrics]), # type: ignore
        )
    return np.concatenate([first, second])


def locations(feats: Features) -> Array:
    """Coordinates used for neighbour searches: embedded if available."""
    return feats.locations if isinstance(feats, NsFeatures) else feats


# region covariance
@singledispatch
def cross_cov(kernel, sigma: float, fa: Features, fb: Features) -> Array:
    raise TypeError(f"Unsupported kernel type {type(kernel).__name__}")


@cross_cov.register
def _(kernel: KernelSpec, sigma: float, fa: Features, fb: Features) -> Array:
    return stationary_cross_cov(kernel, sigma, fa, fb)


@cross_cov.register
def _(kernel: NsCovSpec, sigma: float, fa: Features, fb: Features) -> Array:
    if kernel.sigma != sigma:
        kernel = replace(kernel, sigma=sigma)
    return ns_cross_features(kernel, fa, fb) # type: ignore


def cov_matrix(kernel: Kernel, sigma: float, feats: Features) -> Array:
    cov = cross_cov(kernel, sigma, feats, feats)
    cov = (cov + cov.T) / 2
    np.fill_diagonal(cov, sigma ** 2)
    return cov


def factorize(
    cov: Array,
    scale: float,
    nugget: float,
    max_nugget: float,
    escalation_start: float,
    what: str = "Var(D)",
) -> tuple[tuple[Array, bool], float]:
    """
    Cholesky factor of cov + nugget * scale * I.

    On failure the nugget is multiplied by 10 until ``max_nugget``; a zero
    nugget restarts the ladder at ``escalation_start``.

    Returns
    -------
    tuple
        The ``cho_factor`` pair and the nugget finally used.
    """
    n = len(cov)
    current = nugget
    while True:
        try:
            factor = linalg.cho_factor(cov + current * scale * np.eye(n), lower=True)
            if current != nugget:
                logger.warning(
                    "%s of size %d needed nugget %.3g (requested %.3g)", what, n, current, nugget
                )
            return factor, current
        except linalg.LinAlgError:
            nxt = current * 10 if current > 0 else escalation_start
            if nxt > max_nugget * (1 + 1e-12):
                break
            current = nxt
    diag = np.sqrt(np.clip(np.diag(cov), 1e-300, None))
    corr = cov / np.outer(diag, diag)
    np.fill_diagonal(corr, 0.0)
    i, j = np.unravel_index(np.argmax(corr), corr.shape) if n > 1 else (0, 0)
    raise FactorizationError(
        f"{what} of size {n} is not positive definite with nugget up to {max_nugget:g} "
        f"of the prior variance; strongest correlation {corr[i, j]:.12f} between "
        f"entries {i} and {j}"
    )

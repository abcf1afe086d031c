"""
Greedy one-point-at-a-time design minimising the mean adjusted variance.

Adjusted variances need no run values, so the whole design can be chosen
before any run is made. Picking candidate c lowers the mean variance over
the evaluation grid G by

    mean_g Cov_D(g, c)^2 / (Var_D(c) + nugget),

so each step takes the candidate with the largest reduction. The adjusted
covariances are kept up to date with rank-one downdates.
"""
import logging
from dataclasses import dataclass, field

import numpy as np
from scipy import linalg

from tense import DEFAULTS
from tense.emulator import covariance as kern
from tense.emulator.adjust import PriorSpec, TrainingSet
from tense.types import Array, PointsLike
import tense.tooling as tooling


logger = logging.getLogger(__name__)

# scores closer than this fraction of sigma^2 count as ties
TIE_TOLERANCE = 1e-12
# candidates with adjusted variance below this fraction of sigma^2 are skipped
ZERO_VARIANCE = 1e-12


@dataclass(frozen=True, eq=False)
class DesignState:
    candidates: Array
    selected: Array = field(default_factory=lambda: np.empty((0, 2)))
    ghost: TrainingSet = field(default_factory=TrainingSet.empty)
    nn_k: int | None = None

    def __post_init__(self):
        candidates = tooling.as_points(self.candidates)
        selected = tooling.as_points(self.selected)
        if len(candidates) == 0:
            raise ValueError("Design needs at least one candidate")
        if len(np.unique(candidates, axis=0)) != len(candidates):
            raise ValueError("Candidate set contains duplicates")
        if len(selected) and len(np.unique(selected, axis=0)) != len(selected):
            raise ValueError("Selected points contain duplicates")
        if self.nn_k is not None and self.nn_k < 1:
            raise ValueError(f"nn_k must be positive, got {self.nn_k}")
        object.__setattr__(self, 'candidates', candidates)
        object.__setattr__(self, 'selected', selected)

    @property
    def conditioning(self) -> Array:
        """Points the design is conditioned on: ghost runs, then selected points."""
        return np.vstack([self.ghost.points, self.selected])


@dataclass(frozen=True)
class DesignResult:
    points: Array
    indices: Array
    mean_variance: Array
    initial_variance: float

    def __len__(self) -> int:
        return len(self.points)


def _coincident(candidates: Array, others: Array) -> np.ndarray:
    if len(others) == 0:
        return np.zeros(len(candidates), dtype=bool)
    return (candidates[:, None, :] == others[None, :, :]).all(axis=2).any(axis=1)


def embedded_distance(prior: PriorSpec, points_a: PointsLike, points_b: PointsLike) -> Array:
    """Distances between the embedded locations of two point sets."""
    fa = kern.locations(kern.features(prior.kernel, points_a))
    fb = kern.locations(kern.features(prior.kernel, points_b))
    return np.linalg.norm(fa[:, None, :] - fb[None, :, :], axis=2)


class _GreedyScorer:
    """Adjusted covariances among candidates and grid, updated per pick."""

    def __init__(self, prior: PriorSpec, state: DesignState, eval_grid: Array):
        kernel, sigma = prior.kernel, prior.sigma
        self.sigma_sq = sigma ** 2
        self.noise = prior.nugget * sigma ** 2

        fc = kern.features(kernel, state.candidates)
        fg = kern.features(kernel, eval_grid)
        cond = state.conditioning

        self.prior_cc = kern.cov_matrix(kernel, sigma, fc)
        self.prior_gc = kern.cross_cov(kernel, sigma, fg, fc)
        self.cc = self.prior_cc.copy()
        self.gc = self.prior_gc.copy()
        self.vg = np.full(len(eval_grid), self.sigma_sq)

        # prior blocks against the conditioning set, for the neighbour path
        self.cond_loc = np.empty((0, kern.locations(fc).shape[1]))
        self.cand_loc = kern.locations(fc)
        self.gs = np.empty((len(eval_grid), 0))
        self.cs = np.empty((len(state.candidates), 0))
        self.ss = np.empty((0, 0))

        if len(cond):
            fs = kern.features(kernel, cond)
            cfg = DEFAULTS['emulator']
            chol, _ = kern.factorize(
                kern.cov_matrix(kernel, sigma, fs), self.sigma_sq, prior.nugget,
                cfg['max_nugget'], cfg['escalation_start'], "Design conditioning",
            )
            ks_c = kern.cross_cov(kernel, sigma, fs, fc)
            ks_g = kern.cross_cov(kernel, sigma, fs, fg)
            solved_c = linalg.cho_solve(chol, ks_c)
            self.cc -= ks_c.T @ solved_c
            self.gc -= ks_g.T @ solved_c
            self.vg -= np.einsum('ij,ij->j', ks_g, linalg.cho_solve(chol, ks_g))

            self.cond_loc = kern.locations(fs)
            self.gs = ks_g.T
            self.cs = ks_c.T
            self.ss = kern.cov_matrix(kernel, sigma, fs)

    @property
    def n_conditioning(self) -> int:
        return len(self.cond_loc)

    def exact_gain(self) -> Array:
        var_c = np.diag(self.cc)
        return (self.gc ** 2).mean(axis=0) / (np.maximum(var_c, 0.0) + self.noise)

    def neighbour_gain(self, k: int, valid: np.ndarray) -> Array:
        """
        Variance reduction with Cov_D(g, c) and Var_D(c) conditioned only on
        the k conditioning points nearest to c.
        """
        gain = np.zeros(len(self.cand_loc))
        dist = np.linalg.norm(self.cand_loc[:, None, :] - self.cond_loc[None, :, :], axis=2)
        nearest = np.argpartition(dist, k - 1, axis=1)[:, :k]
        eye = np.eye(k) * self.noise
        for c in np.flatnonzero(valid):
            idx = np.sort(nearest[c])
            chol = linalg.cho_factor(self.ss[np.ix_(idx, idx)] + eye, lower=True)
            k_nc = self.cs[c, idx]
            solved = linalg.cho_solve(chol, k_nc)
            var_c = self.sigma_sq - k_nc @ solved
            cov_gc = self.prior_gc[:, c] - self.gs[:, idx] @ solved
            gain[c] = (cov_gc ** 2).mean() / (max(var_c, 0.0) + self.noise)
        return gain

    def pick(self, best: int) -> None:
        v = max(self.cc[best, best], 0.0) + self.noise
        col_g = self.gc[:, best].copy()
        col_c = self.cc[:, best].copy()
        self.gc -= np.outer(col_g, col_c) / v
        self.cc -= np.outer(col_c, col_c) / v
        self.vg -= col_g ** 2 / v

        new_cs = self.prior_cc[:, best]
        self.ss = np.block([
            [self.ss, self.cs[best][:, None]],
            [self.cs[best][None, :], np.array([[self.sigma_sq]])],
        ])
        self.gs = np.column_stack([self.gs, self.prior_gc[:, best]])
        self.cs = np.column_stack([self.cs, new_cs])
        self.cond_loc = np.vstack([self.cond_loc, self.cand_loc[best]])


def sequential_design(
    prior: PriorSpec,
    state: DesignState,
    eval_grid: PointsLike,
    budget: int,
) -> DesignResult:
    """
    Greedy design of ``budget`` points from the state's candidates.

    Ghost runs and already selected points condition the choice. Ties are
    broken by the lowest candidate index. With ``state.nn_k`` set below the
    number of conditioning points, each candidate is scored against its
    ``nn_k`` nearest conditioning points in embedded distance only; the mean
    variance reported is always exact.
    """
    grid = tooling.as_points(eval_grid)
    if budget < 1:
        raise ValueError(f"budget must be at least 1, got {budget}")
    if len(grid) == 0:
        raise ValueError("Evaluation grid is empty")

    available = ~_coincident(state.candidates, state.conditioning)
    if budget > available.sum():
        raise ValueError(
            f"budget {budget} exceeds the {int(available.sum())} available candidates"
        )

    scorer = _GreedyScorer(prior, state, grid)
    initial = float(scorer.vg.mean())
    tol = TIE_TOLERANCE * scorer.sigma_sq
    picks, trace = [], []

    for step in range(budget):
        var_c = np.diag(scorer.cc)
        valid = available & (var_c > ZERO_VARIANCE * scorer.sigma_sq)
        if not valid.any():
            raise ValueError(f"No candidate with positive adjusted variance left at step {step + 1}")

        k = state.nn_k
        if k is not None and k < scorer.n_conditioning:
            gain = scorer.neighbour_gain(k, valid)
        else:
            gain = scorer.exact_gain()
        score = np.where(valid, scorer.vg.mean() - gain, np.inf)
        best = int(np.flatnonzero(score <= score.min() + tol)[0])

        scorer.pick(best)
        available[best] = False
        picks.append(best)
        trace.append(float(scorer.vg.mean()))
        logger.debug(
            "Design step %d: candidate %d at (%g, %g), mean variance %.6g",
            step + 1, best, *state.candidates[best], trace[-1],
        )

    logger.info(
        "Selected %d design points; mean variance %.6g -> %.6g",
        budget, initial, trace[-1],
    )
    idx = np.array(picks, dtype=int)
    return DesignResult(state.candidates[idx], idx, np.array(trace), initial)

import unittest

import numpy as np

from tense.design.points import ghost_points
from tense.design.sequential import DesignState, _GreedyScorer, embedded_distance, sequential_design
from tense.emulator.adjust import TrainingSet, build_emulator, predict
from tense.models import geometry as geo
from tense.testing.points import make_prior
import tense.tooling as tooling


def exhaustive_mean_variance(prior, conditioning: np.ndarray, grid: np.ndarray) -> float:
    data = TrainingSet(conditioning, np.zeros(len(conditioning)))
    return float(predict(build_emulator(prior, data), grid).var.mean())


class TestSequentialDesign_Examples(unittest.TestCase):
    def test_single_pick_is_centre(self):
        prior = make_prior("flat", theta=0.5)
        state = DesignState(tooling.cell_centred_grid(geo.TOY_DOMAIN, 5, 5))
        result = sequential_design(prior, state, tooling.cell_centred_grid(geo.TOY_DOMAIN, 9, 9), 1)
        np.testing.assert_allclose(result.points, [[1.0, 1.0]])
        self.assertEqual(result.indices[0], 12)

    def test_ties_go_to_lowest_index(self):
        prior = make_prior(None, theta=0.5)
        state = DesignState([(0.5, 1.0), (1.5, 1.0)])
        result = sequential_design(prior, state, tooling.cell_centred_grid(geo.TOY_DOMAIN, 8, 8), 1)
        self.assertEqual(result.indices[0], 0)

    def test_respects_tear(self):
        grid = tooling.cell_centred_grid((1.4, 1.8, 0.5, 1.0), 6, 6)
        candidates = [(1.6, 1.1), (1.6, 0.4)]
        stationary = sequential_design(make_prior(None, theta=0.5), DesignState(candidates), grid, 1)
        torn = sequential_design(make_prior("toy1", theta=0.5), DesignState(candidates), grid, 1)
        self.assertEqual(stationary.indices[0], 0)
        self.assertEqual(torn.indices[0], 1)


class TestSequentialDesign_Oracle(unittest.TestCase):
    def setUp(self):
        self.prior = make_prior("toy1", theta=0.5, sigma=0.7)
        self.candidates = tooling.cell_centred_grid(geo.TOY_DOMAIN, 6, 6)
        self.grid = tooling.cell_centred_grid(geo.TOY_DOMAIN, 10, 10)
        self.ghost = ghost_points([(0.0, 0.0), (2.0, 0.0)], 3)

    def test_each_pick_is_exhaustive_minimum(self):
        state = DesignState(self.candidates, ghost=self.ghost)
        result = sequential_design(self.prior, state, self.grid, 4)
        chosen = self.ghost.points
        for step, idx in enumerate(result.indices):
            scores = np.array([
                exhaustive_mean_variance(self.prior, np.vstack([chosen, c]), self.grid)
                if not (c == chosen).all(axis=1).any() else np.inf
                for c in self.candidates
            ])
            self.assertAlmostEqual(scores[idx], scores.min(), delta=1e-9)
            self.assertAlmostEqual(result.mean_variance[step], scores[idx], delta=1e-9)
            chosen = np.vstack([chosen, self.candidates[idx]])

    def test_trace_non_increasing(self):
        result = sequential_design(self.prior, DesignState(self.candidates), self.grid, 8)
        trace = np.concatenate([[result.initial_variance], result.mean_variance])
        self.assertTrue((np.diff(trace) <= 1e-12).all())
        self.assertAlmostEqual(result.initial_variance, 0.49)
        self.assertEqual(len(np.unique(result.indices)), 8)

    def test_previous_selection_conditions(self):
        first = sequential_design(self.prior, DesignState(self.candidates), self.grid, 3)
        resumed = sequential_design(
            self.prior, DesignState(self.candidates, selected=first.points[:2]), self.grid, 1,
        )
        self.assertEqual(resumed.indices[0], first.indices[2])


class TestSequentialDesign_FullSizeOracle(unittest.TestCase):
    """Greedy picks against brute force on a 30 x 30 candidate grid; slow."""

    def test_each_pick_is_exhaustive_minimum(self):
        prior = make_prior("toy1", theta=0.5, sigma=0.7)
        candidates = tooling.cell_centred_grid(geo.TOY_DOMAIN, 30, 30)
        grid = tooling.cell_centred_grid(geo.TOY_DOMAIN, 15, 15)
        ghost = ghost_points([(0.0, 0.0), (2.0, 0.0)], 3)
        result = sequential_design(prior, DesignState(candidates, ghost=ghost), grid, 3)

        chosen = ghost.points
        previous = result.initial_variance
        for step, idx in enumerate(result.indices):
            scores = np.array([
                exhaustive_mean_variance(prior, np.vstack([chosen, c]), grid)
                if not (c == chosen).all(axis=1).any() else np.inf
                for c in candidates
            ])
            self.assertLessEqual(scores[idx], scores.min() + 1e-9, f"step {step}")
            self.assertAlmostEqual(result.mean_variance[step], scores[idx], delta=1e-9)
            self.assertLess(result.mean_variance[step], previous)
            previous = result.mean_variance[step]
            chosen = np.vstack([chosen, candidates[idx]])


class TestSequentialDesign_Neighbours(unittest.TestCase):
    def setUp(self):
        self.prior = make_prior("toy1", theta=0.5)
        self.candidates = tooling.cell_centred_grid(geo.TOY_DOMAIN, 5, 5)
        self.grid = tooling.cell_centred_grid(geo.TOY_DOMAIN, 8, 8)
        self.ghost = ghost_points([(0.0, 0.0), (2.0, 0.0), (2.0, 2.0)], 6)

    def test_all_neighbours_match_exact_gain(self):
        state = DesignState(self.candidates, ghost=self.ghost)
        scorer = _GreedyScorer(self.prior, state, self.grid)
        valid = np.ones(len(self.candidates), dtype=bool)
        np.testing.assert_allclose(
            scorer.neighbour_gain(scorer.n_conditioning, valid), scorer.exact_gain(), rtol=1e-7, atol=1e-12,
        )

    def test_large_nn_k_is_exact(self):
        exact = sequential_design(self.prior, DesignState(self.candidates, ghost=self.ghost), self.grid, 3)
        wide = sequential_design(
            self.prior, DesignState(self.candidates, ghost=self.ghost, nn_k=100), self.grid, 3,
        )
        np.testing.assert_array_equal(exact.indices, wide.indices)

    def test_truncated_reports_exact_variance(self):
        state = DesignState(self.candidates, ghost=self.ghost, nn_k=2)
        result = sequential_design(self.prior, state, self.grid, 3)
        conditioning = np.vstack([self.ghost.points, result.points])
        expected = exhaustive_mean_variance(self.prior, conditioning, self.grid)
        self.assertAlmostEqual(result.mean_variance[-1], expected, delta=1e-9)


class TestSequentialDesign_Errors(unittest.TestCase):
    def setUp(self):
        self.prior = make_prior(None, theta=0.5)
        self.grid = tooling.cell_centred_grid(geo.TOY_DOMAIN, 4, 4)

    def test_budget_exceeds_candidates(self):
        with self.assertRaises(ValueError):
            sequential_design(self.prior, DesignState([(0.5, 0.5), (1.5, 1.5)]), self.grid, 3)

    def test_selected_candidates_are_unavailable(self):
        state = DesignState([(0.5, 0.5), (1.5, 1.5)], selected=[(0.5, 0.5)])
        with self.assertRaises(ValueError):
            sequential_design(self.prior, state, self.grid, 2)

    def test_nonpositive_budget(self):
        with self.assertRaises(ValueError):
            sequential_design(self.prior, DesignState([(0.5, 0.5)]), self.grid, 0)

    def test_state_validation(self):
        with self.assertRaises(ValueError):
            DesignState(np.empty((0, 2)))
        with self.assertRaises(ValueError):
            DesignState([(0.5, 0.5), (0.5, 0.5)])
        with self.assertRaises(ValueError):
            DesignState([(0.5, 0.5)], nn_k=0)


class TestEmbeddedDistance_Tear(unittest.TestCase):
    def test_lifted_distance(self):
        prior = make_prior("toy1")
        dist = embedded_distance(prior, [(1.75, 0.99)], [(1.75, 1.0), (0.25, 0.99)])
        self.assertGreater(dist[0, 0], 0.7)
        self.assertAlmostEqual(dist[0, 1], np.hypot(1.5, 0.4))

    def test_stationary_is_planar(self):
        dist = embedded_distance(make_prior(None), [(0.0, 0.0)], [(0.3, 0.4)])
        self.assertAlmostEqual(dist[0, 0], 0.5)


if __name__ == '__main__':
    unittest.main()

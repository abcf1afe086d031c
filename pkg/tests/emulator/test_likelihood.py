import unittest

import numpy as np

from tense.covkernel import KernelSpec, stationary_cov_matrix
from tense.emulator.adjust import TrainingSet
from tense.emulator.likelihood import estimate_theta_mle, mle_search, profile_loglik
from tense.errors import NumericalError
from tense.testing.points import make_prior, make_training, random_points


def gp_draw(theta: float, n: int, seed: int) -> TrainingSet:
    pts = random_points(n, seed=seed)
    cov = stationary_cov_matrix(KernelSpec(theta=theta), 1.0, pts) + 1e-8 * np.eye(n)
    z = np.random.default_rng(seed).standard_normal(n)
    return TrainingSet(pts, np.linalg.cholesky(cov) @ z)


class TestEstimateThetaMle_Recovery(unittest.TestCase):
    def setUp(self):
        self.prior = make_prior(None, theta=1.0)
        self.data = gp_draw(0.5, 40, seed=21)

    def test_recovers_length_scale(self):
        theta = estimate_theta_mle(self.prior, self.data, (0.05, 5.0))
        self.assertGreaterEqual(theta, 0.25)
        self.assertLessEqual(theta, 1.0)

    def test_scale_invariant(self):
        doubled = TrainingSet(self.data.points, 2 * self.data.values)
        first = estimate_theta_mle(self.prior, self.data, (0.05, 5.0))
        second = estimate_theta_mle(self.prior, doubled, (0.05, 5.0))
        self.assertAlmostEqual(first, second, delta=1e-6 * first)

    def test_result_carries_profile(self):
        result = mle_search(self.prior, self.data, (0.05, 5.0), grid_points=11)
        self.assertEqual(len(result.profile), 11)
        self.assertFalse(result.on_edge)
        self.assertGreaterEqual(result.loglik, result.profile['loglik'].max())
        self.assertEqual(result.bounds, (0.05, 5.0))

    def test_profile_is_shift_invariant(self):
        shifted = TrainingSet(self.data.points, self.data.values + 3.0)
        self.assertAlmostEqual(
            profile_loglik(self.prior, self.data, 0.7),
            profile_loglik(self.prior, shifted, 0.7),
            places=8,
        )


class TestEstimateThetaMle_Edges(unittest.TestCase):
    def test_tense_kernel(self):
        data = make_training("toy1", n_side=5)
        theta = estimate_theta_mle(make_prior("toy1"), data, (0.1, 2.0))
        self.assertTrue(0.1 <= theta <= 2.0)


class TestEstimateThetaMle_Errors(unittest.TestCase):
    def test_too_few_runs(self):
        data = make_training("toy1", points=random_points(4, seed=1))
        with self.assertRaises(ValueError):
            estimate_theta_mle(make_prior(None), data, (0.1, 1.0))

    def test_ghosts_do_not_count(self):
        real = make_training("toy1", points=random_points(4, seed=1, margin=0.2))
        ghosts = TrainingSet([(0.0, 0.0), (2.0, 0.0), (0.0, 2.0)], np.zeros(3), ("ghost",) * 3)
        with self.assertRaises(ValueError):
            estimate_theta_mle(make_prior(None), real.concat(ghosts), (0.1, 1.0))
        theta = estimate_theta_mle(make_prior(None), real.concat(ghosts), (0.1, 1.0), include_ghosts=True)
        self.assertTrue(0.1 <= theta <= 1.0)

    def test_bad_bounds(self):
        data = make_training("toy1")
        for bounds in ((0.0, 1.0), (1.0, 0.5)):
            with self.assertRaises(ValueError):
                estimate_theta_mle(make_prior(None), data, bounds)

    def test_constant_data_has_no_finite_likelihood(self):
        data = TrainingSet(random_points(6, seed=2), np.ones(6))
        with self.assertRaises(NumericalError):
            estimate_theta_mle(make_prior(None), data, (0.1, 1.0))


if __name__ == '__main__':
    unittest.main()

import unittest

import numpy as np

from tense.covkernel import (
    KernelSpec,
    mahalanobis_sq,
    stationary_correlation,
    stationary_cov_matrix,
    stationary_cross_cov,
)
from tense.errors import FactorizationError
from tense.nscov import min_eigenvalue_check
from tense.testing.points import random_points


# region distances
class TestMahalanobis_Examples(unittest.TestCase):
    def test_identity_metric(self):
        self.assertAlmostEqual(mahalanobis_sq([0.3, 0.4], np.eye(2)), 0.25, places=14)

    def test_zero_vector(self):
        metric = np.array([[2.0, 0.3], [0.3, 1.0]])
        self.assertEqual(mahalanobis_sq([0.0, 0.0], metric), 0.0)

    def test_embedded_metric(self):
        metric = np.array([[3.0, 0.0, -1.0], [0.0, 1.0, 0.0], [-1.0, 0.0, 3.0]])
        self.assertAlmostEqual(mahalanobis_sq([1.0, 0.0, 1.0], metric), 1.0, places=12)

    def test_stack_of_vectors(self):
        result = mahalanobis_sq([[0.3, 0.4], [1.0, 0.0]], 4 * np.eye(2))
        np.testing.assert_allclose(result, [0.0625, 0.25], rtol=1e-12)

    def test_non_spd_metric_raises(self):
        with self.assertRaises(FactorizationError):
            mahalanobis_sq([1.0, 0.0], np.array([[1.0, 2.0], [2.0, 1.0]]))

    def test_dimension_mismatch_raises(self):
        with self.assertRaises(ValueError):
            mahalanobis_sq([1.0, 0.0, 0.0], np.eye(2))


# region spec
class TestKernelSpec_Validation(unittest.TestCase):
    def test_default_metric_is_theta_squared_identity(self):
        spec = KernelSpec(theta=0.5)
        np.testing.assert_allclose(spec.metric, 0.25 * np.eye(2))

    def test_nonpositive_theta(self):
        with self.assertRaises(ValueError):
            KernelSpec(theta=0.0)

    def test_unknown_family(self):
        with self.assertRaises(ValueError):
            KernelSpec(family="cubic") # type: ignore

    def test_nonpositive_nu_for_matern(self):
        with self.assertRaises(ValueError):
            KernelSpec(family="matern", nu=0.0)

    def test_asymmetric_metric(self):
        with self.assertRaises(ValueError):
            KernelSpec(metric=np.array([[1.0, 0.5], [0.0, 1.0]]))

    def test_with_theta_rescales_metric(self):
        spec = KernelSpec(theta=1.0, metric=np.diag([1.0, 4.0])).with_theta(2.0)
        np.testing.assert_allclose(spec.metric, np.diag([4.0, 16.0]))

    def test_isotropic_uses_configured_family(self):
        spec = KernelSpec.isotropic(0.3)
        self.assertEqual(spec.family, "squared_exponential")
        self.assertEqual(spec.theta, 0.3)


# region correlation
class TestStationaryCorrelation_SquaredExponential(unittest.TestCase):
    def setUp(self):
        self.spec = KernelSpec(theta=0.7)

    def test_one_at_zero(self):
        self.assertEqual(stationary_correlation(self.spec, [0.0, 0.0]), 1.0)

    def test_within_unit_interval(self):
        rng = np.random.default_rng(3)
        values = stationary_correlation(self.spec, rng.normal(size=(200, 2)))
        self.assertTrue(((values > 0) & (values < 1)).all())

    def test_closed_form(self):
        dx = np.array([0.2, -0.5])
        expected = np.exp(-(dx @ dx) / 0.49)
        self.assertAlmostEqual(stationary_correlation(self.spec, dx), expected, places=14)

    def test_orthogonal_invariance(self):
        rng = np.random.default_rng(4)
        dx = rng.normal(size=(50, 2))
        angle = 0.83
        rotation = np.array([[np.cos(angle), -np.sin(angle)], [np.sin(angle), np.cos(angle)]])
        np.testing.assert_allclose(
            stationary_correlation(self.spec, dx),
            stationary_correlation(self.spec, dx @ rotation.T),
            rtol=1e-12,
        )


class TestStationaryCorrelation_Matern(unittest.TestCase):
    def test_half_matches_exponential(self):
        spec = KernelSpec(family="matern", theta=0.4, nu=0.5)
        dx = np.random.default_rng(5).normal(size=(100, 2))
        expected = np.exp(-np.linalg.norm(dx, axis=1) / 0.4)
        np.testing.assert_allclose(stationary_correlation(spec, dx), expected, rtol=1e-12)

    def test_one_at_zero(self):
        for nu in (0.5, 1.5, 2.5, 1.2):
            spec = KernelSpec(family="matern", theta=1.0, nu=nu)
            self.assertEqual(stationary_correlation(spec, [0.0, 0.0]), 1.0)

    def test_bessel_path_near_closed_form(self):
        closed = KernelSpec(family="matern", theta=0.8, nu=1.5)
        bessel = KernelSpec(family="matern", theta=0.8, nu=1.4999)
        dx = np.random.default_rng(6).uniform(0.05, 2.0, size=(40, 2))
        np.testing.assert_allclose(
            stationary_correlation(bessel, dx),
            stationary_correlation(closed, dx),
            rtol=1e-3,
        )

    def test_decreasing_in_distance(self):
        spec = KernelSpec(family="matern", theta=1.0, nu=2.5)
        dx = np.column_stack([np.linspace(0, 3, 30), np.zeros(30)])
        values = stationary_correlation(spec, dx)
        self.assertTrue((np.diff(values) < 0).all())


# region matrices
class TestStationaryCovMatrix_Psd(unittest.TestCase):
    def test_random_sets(self):
        spec = KernelSpec(theta=0.3)
        rng = np.random.default_rng(7)
        for i in range(100):
            n = int(rng.integers(2, 51))
            cov = stationary_cov_matrix(spec, 1.3, random_points(n, seed=i))
            min_eig, _ = min_eigenvalue_check(cov)
            self.assertGreaterEqual(min_eig, -1e-10 * 1.3 ** 2 * n)

    def test_diagonal_and_symmetry(self):
        spec = KernelSpec(theta=0.5)
        cov = stationary_cov_matrix(spec, 2.0, random_points(10, seed=1))
        np.testing.assert_allclose(np.diag(cov), 4.0)
        np.testing.assert_array_equal(cov, cov.T)

    def test_cross_cov_shape(self):
        spec = KernelSpec(theta=0.5)
        block = stationary_cross_cov(spec, 1.0, random_points(4), random_points(7, seed=2))
        self.assertEqual(block.shape, (4, 7))

    def test_cross_cov_empty(self):
        spec = KernelSpec(theta=0.5)
        self.assertEqual(stationary_cross_cov(spec, 1.0, [], random_points(3)).shape, (0, 3))


if __name__ == '__main__':
    unittest.main()

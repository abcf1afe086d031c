import unittest

import numpy as np

from tense.embedding.metric import (
    local_metric,
    local_metrics,
    metric_eigenvalues,
    metric_from_gradient,
    sigma3d_closed_form,
    tangent_basis,
    tangent_map,
)
from tense.models.surfaces import builtin_embedding, planar_surface


def projected_inverse(sigma3d: np.ndarray, grad) -> np.ndarray:
    a = tangent_map(grad)
    return a.T @ np.linalg.solve(sigma3d, a)


# region basis
class TestTangentBasis_Examples(unittest.TestCase):
    def test_unit_x_gradient(self):
        w1, w2, w3 = tangent_basis((1.0, 0.0))
        np.testing.assert_allclose(w1, np.array([1, 0, 1]) / np.sqrt(2), atol=1e-15)
        np.testing.assert_allclose(w2, [0, 1, 0], atol=1e-15)
        np.testing.assert_allclose(w3, np.array([-1, 0, 1]) / np.sqrt(2), atol=1e-15)

    def test_degenerate_gradient(self):
        basis = tangent_basis((0.0, 0.0))
        np.testing.assert_array_equal(np.array(basis), np.eye(3))

    def test_orthonormal(self):
        rng = np.random.default_rng(1)
        for grad in rng.normal(scale=2.0, size=(100, 2)):
            basis = np.array(tangent_basis(grad))
            np.testing.assert_allclose(basis @ basis.T, np.eye(3), atol=1e-12)

    def test_normal_is_orthogonal_to_tangent_map(self):
        grad = (0.3, -1.7)
        _, _, w3 = tangent_basis(grad)
        np.testing.assert_allclose(tangent_map(grad).T @ w3, [0, 0], atol=1e-15)


# region metric
class TestLocalMetric_Examples(unittest.TestCase):
    def test_flat_gradient(self):
        metric = metric_from_gradient((0.0, 0.0), 0.7, 0.5)
        np.testing.assert_allclose(metric.sigma3d, np.diag([0.49, 0.49, 0.25]))

    def test_unit_x_gradient(self):
        metric = metric_from_gradient((1.0, 0.0), 1.0, 2.0)
        expected = np.array([[3.0, 0.0, -1.0], [0.0, 1.0, 0.0], [-1.0, 0.0, 3.0]])
        np.testing.assert_allclose(metric.sigma3d, expected, atol=1e-14)
        np.testing.assert_allclose(projected_inverse(metric.sigma3d, metric.grad), np.eye(2), atol=1e-12)

    def test_from_planar_surface(self):
        metric = local_metric(planar_surface(1.0, 0.0), (0.4, 1.3), 1.0, 2.0)
        np.testing.assert_allclose(metric.projection, [[1, 0], [0, 1], [1, 0]])
        self.assertAlmostEqual(metric.r_sq, 1.0)

    def test_eigenvalues(self):
        metric = metric_from_gradient((0.6, -0.8), 0.5, 0.3)
        np.testing.assert_allclose(metric.eigs, [0.25 * 2.0, 0.25, 0.09])

    def test_nonpositive_parameters(self):
        with self.assertRaises(ValueError):
            metric_from_gradient((0.0, 0.0), 0.0, 0.5)
        with self.assertRaises(ValueError):
            local_metrics(builtin_embedding("toy1"), [(0.5, 0.5)], 1.0, -0.5)


class TestLocalMetric_Properties(unittest.TestCase):
    def setUp(self):
        rng = np.random.default_rng(12)
        self.grads = rng.normal(scale=1.5, size=(200, 2))
        self.thetas = rng.uniform(0.2, 3.0, 200)
        self.alphas = rng.uniform(0.1, 3.0, 200)

    def test_projection_identity(self):
        for grad, theta, alpha3 in zip(self.grads, self.thetas, self.alphas):
            sigma = sigma3d_closed_form(grad[None, :], theta, alpha3)[0]
            diff = projected_inverse(sigma, grad) - np.eye(2) / theta ** 2
            self.assertLessEqual(np.abs(diff).max(), 1e-9 / theta ** 2)

    def test_projection_independent_of_alpha3(self):
        grad = np.array([0.8, -0.4])
        reference = projected_inverse(sigma3d_closed_form(grad[None, :], 1.0, 1.0)[0], grad)
        for alpha3 in (0.01, 0.1, 1.0, 10.0):
            sigma = sigma3d_closed_form(grad[None, :], 1.0, alpha3)[0]
            np.testing.assert_allclose(projected_inverse(sigma, grad), reference, atol=1e-9)

    def test_spectral_consistency(self):
        for grad, theta, alpha3 in zip(self.grads, self.thetas, self.alphas):
            metric = metric_from_gradient(grad, theta, alpha3)
            for w, eig in zip(metric.basis, metric.eigs):
                np.testing.assert_allclose(metric.sigma3d @ w, eig * w, atol=1e-10 * max(eig, 1.0))

    def test_eigenvalues_match_eigensolver(self):
        for grad, theta, alpha3 in zip(self.grads[:50], self.thetas[:50], self.alphas[:50]):
            sigma = sigma3d_closed_form(grad[None, :], theta, alpha3)[0]
            expected = np.sort(metric_eigenvalues(grad @ grad, theta, alpha3))
            np.testing.assert_allclose(np.linalg.eigvalsh(sigma), expected, rtol=1e-9)

    def test_symmetric_positive_definite(self):
        stack = sigma3d_closed_form(self.grads, 0.5, 0.5)
        np.testing.assert_array_equal(stack, np.transpose(stack, (0, 2, 1)))
        self.assertTrue((np.linalg.eigvalsh(stack) > 0).all())


if __name__ == '__main__':
    unittest.main()

import unittest
from dataclasses import replace

import numpy as np

from tense.embedding.surface import (
    EmbeddingSurface,
    Piece,
    embed,
    embed_points,
    finite_difference_gradient,
    on_tear,
    surface_gradient,
    surface_gradients,
    tear_distance,
)
from tense.errors import DomainError, NumericalError
from tense.models.surfaces import BUILTIN_SURFACES, builtin_embedding, planar_surface
from tense.testing.points import random_points


def without_gradients(surface: EmbeddingSurface) -> EmbeddingSurface:
    return replace(surface, pieces={k: Piece(p.value) for k, p in surface.pieces.items()})


# region embed
class TestEmbed_Examples(unittest.TestCase):
    def test_toy1_left_of_tear(self):
        np.testing.assert_allclose(embed(builtin_embedding("toy1"), (0.5, 1.0)), [0.5, 1.0, 0.0])

    def test_olympus_top_region(self):
        np.testing.assert_allclose(embed(builtin_embedding("olympus"), (10, 130)), [10, 130, 1])

    def test_olympus_origin(self):
        np.testing.assert_allclose(embed(builtin_embedding("olympus"), (0, 0)), [0, 0, 0])

    def test_toy1_sides_of_tear(self):
        surface = builtin_embedding("toy1")
        lifted = embed_points(surface, [(1.75, 0.5), (1.75, 1.5)])
        np.testing.assert_allclose(lifted[:, 2], [0.4, -0.4])

    def test_outside_domain(self):
        with self.assertRaises(DomainError):
            embed(builtin_embedding("toy1"), (2.1, 0.5))


# region gradients
class TestSurfaceGradient_Examples(unittest.TestCase):
    def test_flat_region(self):
        vx, vy = surface_gradient(builtin_embedding("toy1"), (0.5, 1.5))
        self.assertEqual((vx, vy), (0.0, 0.0))

    def test_toy1_upper_slope(self):
        vx, vy = surface_gradient(builtin_embedding("toy1"), (1.0, 1.5))
        self.assertAlmostEqual(vx, -0.2, places=12)
        self.assertAlmostEqual(vy, 0.0, places=12)

    def test_planar_finite_differences(self):
        surface = without_gradients(planar_surface(0.7, -1.3))
        grads = surface_gradients(surface, random_points(30, seed=2))
        np.testing.assert_allclose(grads, np.tile([0.7, -1.3], (30, 1)), atol=1e-8)

    def test_planar_at_domain_corner(self):
        surface = without_gradients(planar_surface(0.7, -1.3))
        grads = finite_difference_gradient(surface, [(0.0, 0.0), (2.0, 2.0)])
        np.testing.assert_allclose(grads, [[0.7, -1.3], [0.7, -1.3]], atol=1e-8)

    def test_on_tear_uses_own_side(self):
        surface = without_gradients(builtin_embedding("toy1"))
        grad = finite_difference_gradient(surface, [(1.0, 1.0)])[0]
        np.testing.assert_allclose(grad, [-0.2, 0.0], atol=1e-8)


class TestSurfaceGradient_FiniteDifferenceAgreement(unittest.TestCase):
    def test_builtin_surfaces_away_from_tears(self):
        for name in ("toy1", "curved", "olympus"):
            surface = builtin_embedding(name)
            pts = random_points(400, surface.domain, seed=5)
            step = 1e-5 * surface.width.max()
            pts = pts[tear_distance(surface, pts) > 4 * step]
            if name == "toy1":
                pts = pts[np.abs(pts[:, 0] - 0.75) > 0.01]
            if name == "olympus":
                # keep clear of the kinks where the bends start
                regions = surface.regions(pts)
                pts = pts[(regions == 3) | (regions == 5) | (pts[:, 0] > 100)]
            analytic = surface_gradients(surface, pts)
            numeric = finite_difference_gradient(without_gradients(surface), pts)
            scale = 1.0 / surface.width.max()
            np.testing.assert_allclose(numeric, analytic, atol=1e-6 * max(scale, 1.0), err_msg=name)


class TestFiniteDifferenceGradient_Stuck(unittest.TestCase):
    def test_isolated_region_raises(self):
        # region 1 is a strip narrower than the stencil along x
        surface = EmbeddingSurface(
            name="strip",
            domain=(0.0, 1.0, 0.0, 1.0),
            region_of=lambda pts: (np.abs(pts[:, 0] - 0.5) < 1e-9).astype(int),
            pieces={0: Piece(lambda pts: pts[:, 0]), 1: Piece(lambda pts: pts[:, 1])},
        )
        with self.assertRaises(NumericalError):
            finite_difference_gradient(surface, [(0.5, 0.5)])


# region tears
class TestTears_Flags(unittest.TestCase):
    def setUp(self):
        self.surface = builtin_embedding("toy1")

    def test_distance_to_line(self):
        np.testing.assert_allclose(tear_distance(self.surface, [(1.5, 1.2)]), [0.2])

    def test_distance_to_end_point(self):
        np.testing.assert_allclose(tear_distance(self.surface, [(0.5, 1.0)]), [0.25])

    def test_on_tear(self):
        flags = on_tear(self.surface, [(1.5, 1.0), (0.5, 1.0), (1.5, 1.1)])
        np.testing.assert_array_equal(flags, [True, False, False])

    def test_surface_without_tears(self):
        self.assertTrue(np.isinf(tear_distance(builtin_embedding("flat"), [(1.0, 1.0)])).all())


class TestEmbeddingSurface_Validation(unittest.TestCase):
    def test_empty_domain(self):
        with self.assertRaises(ValueError):
            EmbeddingSurface("bad", (1.0, 1.0, 0.0, 1.0), lambda p: np.zeros(len(p), int), {0: Piece(lambda p: p[:, 0])})

    def test_no_pieces(self):
        with self.assertRaises(ValueError):
            EmbeddingSurface("bad", (0.0, 1.0, 0.0, 1.0), lambda p: np.zeros(len(p), int), {})

    def test_unknown_region(self):
        surface = EmbeddingSurface("bad", (0.0, 1.0, 0.0, 1.0), lambda p: np.ones(len(p), int), {0: Piece(lambda p: p[:, 0])})
        with self.assertRaises(ValueError):
            surface.values([(0.5, 0.5)])

    def test_builtin_regions_are_total(self):
        for name in BUILTIN_SURFACES:
            surface = builtin_embedding(name)
            regions = surface.regions(random_points(200, surface.domain, seed=8))
            self.assertTrue(set(regions) <= set(surface.pieces), name)


if __name__ == '__main__':
    unittest.main()

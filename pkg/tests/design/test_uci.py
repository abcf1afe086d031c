import unittest

import numpy as np

from tense.design.uci import UciSpec, uci_region, uci_value
from tense.emulator.adjust import TrainingSet, build_emulator, predict
from tense.testing.points import make_prior, make_training, random_points


class TestUciRegion_Examples(unittest.TestCase):
    def setUp(self):
        self.data = make_training("toy1")
        self.em = build_emulator(make_prior("toy1", theta=0.5, sigma=0.7), self.data)
        self.grid = random_points(200, seed=5)

    def test_infinite_delta_keeps_everything(self):
        mask = uci_region(self.em, self.grid, UciSpec(f_plus=10.0, delta=np.inf))
        self.assertTrue(mask.all())

    def test_design_points_reduce_to_mean(self):
        f_plus = float(np.median(self.data.values))
        mask = uci_region(self.em, self.data.points, UciSpec(f_plus=f_plus, c=3.0))
        clear = np.abs(self.data.values - f_plus) > 1e-2
        np.testing.assert_array_equal(mask[clear], (self.data.values > f_plus)[clear])

    def test_prior_only_keeps_everything(self):
        em = build_emulator(make_prior("toy1", mean=0.3), TrainingSet.empty())
        mask = uci_region(em, self.grid, UciSpec(f_plus=0.3))
        self.assertTrue(mask.all())

    def test_shrinks_with_c(self):
        f_plus = float(self.data.values.max())
        wide = uci_region(self.em, self.grid, UciSpec(f_plus=f_plus, c=3.0))
        narrow = uci_region(self.em, self.grid, UciSpec(f_plus=f_plus, c=1.0))
        self.assertTrue((wide | ~narrow).all())
        self.assertLess(narrow.sum(), len(self.grid))

    def test_value(self):
        pred = predict(self.em, self.grid)
        np.testing.assert_allclose(
            uci_value(self.em, self.grid, UciSpec(f_plus=0.0, c=2.0)), pred.mean + 2 * pred.sd,
        )


class TestUciSpec_Validation(unittest.TestCase):
    def test_defaults(self):
        spec = UciSpec(f_plus=1.0)
        self.assertEqual(spec.c, 3.0)
        self.assertEqual(spec.delta, 0.0)

    def test_invalid(self):
        with self.assertRaises(ValueError):
            UciSpec(f_plus=1.0, c=0.0)
        with self.assertRaises(ValueError):
            UciSpec(f_plus=1.0, delta=-1.0)


if __name__ == '__main__':
    unittest.main()

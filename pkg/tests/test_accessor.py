import tempfile
import unittest
from pathlib import Path

import numpy as np
import pandas as pd

import tense
from tense.design.uci import UciSpec
from tense.emulator.adjust import TrainingSet, build_emulator, predict
from tense.models.surfaces import builtin_embedding
from tense.testing.points import make_prior, make_training


class TestTenseFrame_Predict(unittest.TestCase):
    def setUp(self):
        self.em = build_emulator(make_prior("toy1", theta=0.5, sigma=0.7), make_training("toy1"))
        self.df = pd.DataFrame({'x': [0.3, 1.2, 1.75], 'y': [0.4, 1.6, 1.0]})

    def test_adds_moments(self):
        result = self.df.tense.predict(self.em)
        pred = predict(self.em, self.df[['x', 'y']].to_numpy())
        np.testing.assert_allclose(result['mean'], pred.mean)
        np.testing.assert_allclose(result['sd'], pred.sd)
        self.assertEqual(result.attrs['tense']['clamped'], 0)
        self.assertNotIn('mean', self.df.columns)

    def test_custom_labels(self):
        result = self.df.tense.predict(self.em, mean='E', sd='SD')
        self.assertListEqual(list(result.columns), ['x', 'y', 'E', 'SD'])

    def test_missing_columns(self):
        with self.assertRaises(KeyError):
            pd.DataFrame({'x': [0.1]}).tense.points

    def test_uci(self):
        result = self.df.tense.uci(self.em, UciSpec(f_plus=np.inf))
        self.assertFalse(result['in_region'].any())
        result = self.df.tense.uci(self.em, UciSpec(f_plus=0.0, delta=np.inf))
        self.assertTrue(result['in_region'].all())


class TestTenseFrame_Surface(unittest.TestCase):
    def setUp(self):
        self.surface = builtin_embedding("toy1")
        self.df = pd.DataFrame({'x': [1.75, 1.75, 0.25, 1.75], 'y': [1.0, 0.5, 1.0, 0.999]})

    def test_regions_follow_half_open_convention(self):
        result = self.df.tense.regions(self.surface)
        self.assertEqual(result['region'][0], result['region'][2])
        self.assertNotEqual(result['region'][0], result['region'][1])
        self.assertEqual(result['region'][1], result['region'][3])

    def test_flag_tears(self):
        flags = self.df.tense.flag_tears(self.surface)['on_tear']
        self.assertListEqual(list(flags), [True, False, False, False])
        loose = self.df.tense.flag_tears(self.surface, tear_tolerance=0.01)['on_tear']
        self.assertListEqual(list(loose), [True, False, False, True])


class TestTenseFrame_Output(unittest.TestCase):
    def test_grid_csv(self):
        em = build_emulator(make_prior("toy1"), TrainingSet.empty())
        df = pd.DataFrame({'x': [0.5, 1.5], 'y': [0.5, 0.5]})
        with tempfile.TemporaryDirectory() as tmp:
            path = df.tense.predict(em).tense.to_grid_csv(Path(tmp) / "grid.csv")
            text = path.read_text()
        self.assertEqual(text, "x,y,mean,sd\n0.5,0.5,0,1\n1.5,0.5,0,1\n")


if __name__ == '__main__':
    unittest.main()

from pathlib import Path

import numpy as np
import pandas as pd

from tense.design.uci import UciSpec, uci_value
from tense.embedding.surface import EmbeddingSurface, on_tear
from tense.emulator.adjust import AdjustedEmulator, predict
from tense.types import Array
import tense.output.csv as csv_out


@pd.api.extensions.register_dataframe_accessor("tense")
class TenseFrame:
    def __init__(self, pandas_obj):
        self._obj = pandas_obj

    @property
    def points(self) -> Array:
        """Input locations from the x and y columns as an (n, 2) array."""
        missing = {'x', 'y'} - set(self._obj.columns)
        if missing:
            raise KeyError(f"Frame lacks location columns {sorted(missing)}")
        return self._obj[['x', 'y']].to_numpy(float)

    #region emulation
    def predict(
        self,
        em: AdjustedEmulator,
        mean: str = 'mean',
        sd: str = 'sd',
    ) -> pd.DataFrame:
        """
        Add adjusted means and standard deviations at the frame's locations.

        Parameters
        ----------
        em (AdjustedEmulator):
            Emulator to predict with.
        mean (str):
            Column for the adjusted mean. Default 'mean'.
        sd (str):
            Column for the adjusted standard deviation. Default 'sd'.

        Returns
        -------
        pd.DataFrame:
            Copy of the frame with the two columns added. The number of
            clamped variances is kept in ``attrs['tense']['clamped']``.
        """
        pred = predict(em, self.points)
        result = self._obj.assign(**{mean: pred.mean, sd: pred.sd})
        result.attrs['tense'] = {**self._obj.attrs.get('tense', {}), 'clamped': pred.clamped}
        return result

    def uci(
        self,
        em: AdjustedEmulator,
        spec: UciSpec,
        label: str = 'uci',
        mask: str = 'in_region',
    ) -> pd.DataFrame:
        """
        Add the upper credible interval and whether it clears f_plus - delta.

        Parameters
        ----------
        em (AdjustedEmulator):
            Emulator the interval is taken from.
        spec (UciSpec):
            Interval width and threshold.
        label (str):
            Column for the interval. Default 'uci'.
        mask (str):
            Column for the region mask. Default 'in_region'.

        Returns
        -------
        pd.DataFrame:
            Copy of the frame with the two columns added.
        """
        value = uci_value(em, self.points, spec)
        return self._obj.assign(**{label: value, mask: value > spec.f_plus - spec.delta})
    #endregion

    #region surface
    def regions(self, surface: EmbeddingSurface, label: str = 'region') -> pd.DataFrame:
        """Add the embedding region of each location."""
        return self._obj.assign(**{label: surface.regions(self.points)})

    def flag_tears(
        self,
        surface: EmbeddingSurface,
        label: str = 'on_tear',
        tear_tolerance: float | None = None,
    ) -> pd.DataFrame:
        """
        Add a flag for locations lying on a tear line of the surface.

        Parameters
        ----------
        surface (EmbeddingSurface):
            Surface whose tear lines are checked.
        label (str):
            Column for the flag. Default 'on_tear'.
        tear_tolerance (float|None):
            Distance, relative to the domain diagonal, that counts as on the
            tear. Default from ``DEFAULTS['embedding']``.

        Returns
        -------
        pd.DataFrame:
            Copy of the frame with the flag added.
        """
        flags = on_tear(surface, self.points, tear_tolerance=tear_tolerance)
        return self._obj.assign(**{label: np.asarray(flags, dtype=bool)})
    #endregion

    #region output
    def to_grid_csv(self, path: str | Path, precision: int | None = None) -> Path:
        """Write the x, y, mean and sd columns as a grid CSV."""
        return csv_out.write_grid_csv(self._obj, path, precision=precision)
    #endregion

from typing import TYPE_CHECKING

if TYPE_CHECKING:
    import pandas as pd
    from tense.accessors.dataframe import TenseFrame

    class DataFrame(pd.DataFrame):
        tense: TenseFrame

from tense.config import DEFAULTS
import tense.accessors.dataframe

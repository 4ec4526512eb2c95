import numpy as np
from pandas import DataFrame


class ReportFrame(DataFrame):
    """Tabular report with byte-stable CSV export."""

    def having(self, **conditions) -> 'ReportFrame':
        """Rows whose columns equal the given values."""
        mask = np.ones(len(self), dtype=bool)
        for column, value in conditions.items():
            mask &= (self[column] == value).to_numpy()
        return self[mask]

    def to_csv_text(self) -> str:
        # repr-precision floats keep the export reproducible across runs
        return self.to_csv(index=False, lineterminator='\n', float_format='%.17g')

    @property
    def _constructor(self):
        return self.__class__

"""
Return-sample repository: single-column CSV with header ``log_return``.
"""
import re
from pathlib import Path
from typing import List, Optional

import numpy as np
import pandas as pd

from app.core.base import BaseRepository, PathLike
from app.core.config import settings
from app.core.exceptions import InputFileError
from app.schemas.kou import ReturnSample

COLUMN = "log_return"
FILENAME = "returns.csv"

_LINE = re.compile(r"line (\d+)")


def read_csv(path: Path, **kwargs) -> pd.DataFrame:
    """pandas.read_csv with round-trip floats, errors turned into InputFileError."""
    if not path.is_file():
        raise InputFileError(f"{path} does not exist")
    try:
        return pd.read_csv(path, float_precision="round_trip", **kwargs)
    except pd.errors.EmptyDataError as e:
        raise InputFileError(f"{path} is empty", line=1) from e
    except pd.errors.ParserError as e:
        match = _LINE.search(str(e))
        raise InputFileError(f"{path}: {e}", line=int(match.group(1)) if match else None) from e


def numeric_column(frame: pd.DataFrame, column: str, path: Path) -> np.ndarray:
    """Column as float64; the first unparsable cell is reported with its file line."""
    values = pd.to_numeric(frame[column], errors="coerce").to_numpy(dtype=np.float64, na_value=np.nan)
    bad = ~np.isfinite(values)
    if bad.any():
        row = int(np.flatnonzero(bad)[0])
        # header is line 1
        line = row + 2
        raise InputFileError(
            f"{path} line {line}: {column} value {frame[column].iloc[row]!r} is not a finite number",
            line=line,
        )
    return values


class ReturnsRepository(BaseRepository[ReturnSample]):
    """Repository for daily log-return samples."""

    def load(self, name: PathLike = FILENAME, dt: Optional[float] = None) -> ReturnSample:
        """Read a sample; ``name`` may be absolute."""
        path = self.path(str(name))
        frame = read_csv(path)
        if COLUMN not in frame.columns:
            raise InputFileError(f"{path}: missing '{COLUMN}' header", line=1)
        values = numeric_column(frame, COLUMN, path)
        if values.size == 0:
            raise InputFileError(f"{path} holds no returns", line=2)
        return ReturnSample(values=values, dt=settings.DT if dt is None else dt)

    def save(self, sample: ReturnSample, name: str = FILENAME) -> List[Path]:
        """Write the sample; float repr keeps values bit-exact."""
        self.ensure_root()
        path = self.path(name)
        pd.DataFrame({COLUMN: sample.values}).to_csv(path, index=False)
        return [path]

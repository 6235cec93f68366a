"""
Calibration artifacts: params.json, trace.csv and density_report.csv.
"""
import json
from pathlib import Path
from typing import List, Optional

import pandas as pd
from pydantic import ValidationError

from app.core.base import BaseRepository, PathLike
from app.core.exceptions import InputFileError
from app.schemas.calibration import CalibrationResult
from app.schemas.kou import KouParams

PARAMS_FILE = "params.json"
TRACE_FILE = "trace.csv"
DENSITY_FILE = "density_report.csv"


class CalibrationRepository(BaseRepository[KouParams]):
    """Repository for calibration outputs."""

    def load(self, name: PathLike = PARAMS_FILE) -> KouParams:
        """Parameters from a params.json (extra result fields are ignored)."""
        path = self.path(str(name))
        if not path.is_file():
            raise InputFileError(f"{path} does not exist")
        try:
            data = json.loads(path.read_text())
        except json.JSONDecodeError as e:
            raise InputFileError(f"{path}: {e.msg}", line=e.lineno) from e
        if not isinstance(data, dict):
            raise InputFileError(f"{path}: expected a JSON object", line=1)
        allowed = set(KouParams.model_fields) | {"lambda"}
        try:
            return KouParams(**{k: v for k, v in data.items() if k in allowed})
        except ValidationError as e:
            raise InputFileError(f"{path}: {e}") from e

    def save(self, result: CalibrationResult, density: Optional[pd.DataFrame] = None) -> List[Path]:
        self.ensure_root()
        params_path = self.path(PARAMS_FILE)
        params_path.write_text(json.dumps(result.summary(), indent=2))

        trace_path = self.path(TRACE_FILE)
        pd.DataFrame(result.trace, columns=["iteration", "log_likelihood", "best_log_likelihood"]).to_csv(
            trace_path, index=False
        )
        written = [params_path, trace_path]
        if density is not None:
            density_path = self.path(DENSITY_FILE)
            density.to_csv(density_path, index=False)
            written.append(density_path)
        return written

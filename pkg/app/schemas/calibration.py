"""
Calibration Pydantic schemas.
"""
from typing import List, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field

from app.core.config import settings
from app.schemas.kou import KouParams


class CalibrationConfig(BaseModel):
    """Settings for one maximum-likelihood run."""

    model_config = ConfigDict(frozen=True)

    max_iters: int = Field(default_factory=lambda: settings.CALIBRATION_MAX_ITERS, gt=0)
    learning_rate: float = Field(default_factory=lambda: settings.CALIBRATION_LR, gt=0.0)
    tolerance: float = Field(default_factory=lambda: settings.CALIBRATION_TOLERANCE, gt=0.0)
    init: Optional[KouParams] = None
    seed: int = 0
    fix_lambda: bool = False
    # window (iterations) over which the relative improvement is measured
    patience: int = Field(default=50, gt=0)


# (iteration, log_likelihood of the iterate, best log_likelihood so far)
TraceRow = Tuple[int, float, float]


class CalibrationResult(BaseModel):
    """Best-seen iterate of a calibration run."""

    model_config = ConfigDict(frozen=True)

    params: KouParams
    log_likelihood: float
    iterations: int
    trace: List[TraceRow]
    converged: bool

    def summary(self) -> dict:
        """Flat dict with exactly the fields persisted in params.json."""
        out = self.params.model_dump(by_alias=True)
        out.update(
            log_likelihood=self.log_likelihood,
            iterations=self.iterations,
            converged=self.converged,
        )
        return out

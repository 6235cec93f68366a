"""
Simulation Pydantic schemas.
"""
from typing import Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from app.core.config import settings
from app.schemas.base import ArrayModel, FloatArray
from app.schemas.kou import KouParams


class SimConfig(BaseModel):
    """Monte-Carlo grid: s0, number of days and paths, step and seed."""

    model_config = ConfigDict(frozen=True)

    s0: float = Field(default_factory=lambda: settings.S0, gt=0.0)
    n_days: int = Field(default_factory=lambda: settings.N_DAYS, ge=1)
    n_paths: int = Field(default_factory=lambda: settings.N_PATHS, ge=1)
    dt: float = Field(default_factory=lambda: settings.DT, gt=0.0)
    seed: int = 0

    @property
    def horizon(self) -> float:
        return self.n_days * self.dt


class PathSet(ArrayModel):
    """Simulated prices, one row per path, column 0 holding s0."""

    prices: FloatArray
    seed: int
    params: KouParams
    dt: float = Field(..., gt=0.0)
    jump_counts: Optional[FloatArray] = None

    @field_validator("prices")
    @classmethod
    def check_prices(cls, v: np.ndarray) -> np.ndarray:
        if v.ndim != 2 or v.shape[1] < 2:
            raise ValueError("prices must be a (n_paths, n_days + 1) matrix")
        if not np.all(np.isfinite(v)) or np.any(v <= 0.0):
            raise ValueError("prices must be finite and strictly positive")
        v.setflags(write=False)
        return v

    @model_validator(mode="after")
    def check_initial_column(self) -> "PathSet":
        if np.any(self.prices[:, 0] != self.prices[0, 0]):
            raise ValueError("all paths must start from the same s0")
        return self

    @property
    def n_paths(self) -> int:
        return int(self.prices.shape[0])

    @property
    def n_days(self) -> int:
        return int(self.prices.shape[1] - 1)

    @property
    def s0(self) -> float:
        return float(self.prices[0, 0])

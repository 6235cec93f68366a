"""
Utility, training and wealth-path schemas.
"""
from typing import Literal, Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from app.core.config import settings
from app.schemas.base import ArrayModel, FloatArray
from app.schemas.neural import PolicyCheckpoint

UtilityMode = Literal["CRRA", "WDRA"]
WealthRef = Literal["initial", "batch_mean"]


class RiskAversionCoeffs(BaseModel):
    """Coefficients of rho(W) = b0 + b1 * W + b2 * W**3.

    b0 = 3 - b1 - b2 puts the risk aversion at the reference ratio W = 1
    at 3.
    """

    model_config = ConfigDict(frozen=True)

    b0: float = 3.32
    b1: float = 0.13
    b2: float = -0.45

    @classmethod
    def constant(cls, rho: float) -> "RiskAversionCoeffs":
        return cls(b0=rho, b1=0.0, b2=0.0)

    @classmethod
    def centered(cls, b1: float = 0.13, b2: float = -0.45, average: float = 3.0) -> "RiskAversionCoeffs":
        """Pick b0 so that rho(1) == average."""
        return cls(b0=average - b1 - b2, b1=b1, b2=b2)


class TrainConfig(BaseModel):
    """Economic set-up plus optimisation hyper-parameters."""

    model_config = ConfigDict(frozen=True)

    zeta: float = Field(default_factory=lambda: settings.ZETA, ge=0.0, le=1.0)
    eta_discount: float = Field(default_factory=lambda: settings.DISCOUNT_RATE, ge=0.0)
    r: float = Field(default_factory=lambda: settings.RISK_FREE_RATE)
    w0: float = Field(default_factory=lambda: settings.W0, gt=0.0)
    dt: float = Field(default_factory=lambda: settings.DT, gt=0.0)
    utility_mode: UtilityMode = "WDRA"
    rho: float = Field(default_factory=lambda: settings.CRRA_RHO, gt=0.0)
    coeffs: RiskAversionCoeffs = RiskAversionCoeffs()
    batch_size: int = Field(default_factory=lambda: settings.BATCH_SIZE, ge=1)
    learning_rate: float = Field(default_factory=lambda: settings.LEARNING_RATE, gt=0.0)
    epochs: int = Field(default_factory=lambda: settings.EPOCHS, ge=0)
    hidden_size: int = Field(default_factory=lambda: settings.HIDDEN_SIZE, ge=1)
    seed: int = 0
    wealth_floor: float = Field(default_factory=lambda: settings.WEALTH_FLOOR, gt=0.0)
    rho_clip: Tuple[float, float] = (0.2, 10.0)
    wealth_ref: WealthRef = "initial"
    consumption_floor_ratio: float = Field(default=1e-8, gt=0.0)
    horizon: Optional[int] = Field(default=None, ge=1)

    @field_validator("rho_clip")
    @classmethod
    def check_clip(cls, v: Tuple[float, float]) -> Tuple[float, float]:
        lo, hi = v
        if not (0.0 < lo < hi):
            raise ValueError("rho_clip must satisfy 0 < lo < hi")
        return v

    @model_validator(mode="after")
    def check_floor(self) -> "TrainConfig":
        if self.wealth_floor >= self.w0:
            raise ValueError("wealth_floor must lie below w0")
        return self

    @property
    def effective_coeffs(self) -> RiskAversionCoeffs:
        """CRRA is the WDRA cubic with b1 = b2 = 0 and b0 = rho."""
        if self.utility_mode == "CRRA":
            return RiskAversionCoeffs.constant(self.rho)
        return self.coeffs

    @property
    def consumption_floor(self) -> float:
        return self.consumption_floor_ratio * self.w0


class WealthPath(ArrayModel):
    """Wealth, investment rate and consumption along one or more paths.

    Arrays are (T + 1,) / (T,) for a single path or carry a leading path
    axis.
    """

    w: FloatArray
    theta: FloatArray
    c: FloatArray

    @model_validator(mode="after")
    def check_lengths(self) -> "WealthPath":
        if self.w.shape[-1] != self.theta.shape[-1] + 1 or self.theta.shape != self.c.shape:
            raise ValueError("w must have one more step than theta and c")
        return self

    @property
    def terminal(self) -> np.ndarray:
        return self.w[..., -1]


class TrainReport(ArrayModel):
    """Outcome of one training run."""

    config: TrainConfig
    utility_trace: FloatArray
    initial_utility: float
    checkpoint: PolicyCheckpoint
    paths: WealthPath
    floor_hits: int = 0

    @property
    def terminal_wealth(self) -> np.ndarray:
        return self.paths.terminal

    @property
    def theta(self) -> np.ndarray:
        return self.paths.theta

    @property
    def consumption(self) -> np.ndarray:
        return self.paths.c

"""
Jump-diffusion parameter and return-sample schemas.
"""
import math
from typing import Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator

from app.schemas.base import ArrayModel, FloatArray

PARAM_NAMES: Tuple[str, ...] = ("mu", "sigma", "lam", "p", "eta1", "eta2", "alpha")


class KouParams(BaseModel):
    """The seven-tuple (mu, sigma, lambda, p, eta1, eta2, alpha).

    Rates are per year; alpha is the location of the log jump size. The
    downward-jump probability q = 1 - p is derived, never stored. sigma = 0
    and p in {0, 1} are admitted for degenerate simulation and moment checks;
    the return density needs sigma > 0.
    """

    model_config = ConfigDict(frozen=True, populate_by_name=True)

    mu: float
    sigma: float = Field(..., ge=0.0)
    lam: float = Field(..., ge=0.0, alias="lambda")
    p: float = Field(..., ge=0.0, le=1.0)
    eta1: float = Field(..., gt=1.0)
    eta2: float = Field(..., gt=0.0)
    alpha: float = 0.0

    @field_validator("*")
    @classmethod
    def check_finite(cls, v: float) -> float:
        if not math.isfinite(v):
            raise ValueError("parameters must be finite")
        return v

    @property
    def q(self) -> float:
        return 1.0 - self.p

    def to_vector(self) -> np.ndarray:
        return np.array([getattr(self, k) for k in PARAM_NAMES], dtype=np.float64)

    @classmethod
    def from_vector(cls, x) -> "KouParams":
        x = np.asarray(x, dtype=np.float64).ravel()
        if x.size != len(PARAM_NAMES):
            raise ValueError(f"expected {len(PARAM_NAMES)} values, got {x.size}")
        return cls(**{k: float(x[i]) for i, k in enumerate(PARAM_NAMES)})

    def replace(self, **changes) -> "KouParams":
        data = self.model_dump()
        data.update(changes)
        return KouParams(**data)


# Estimated from one year of daily data of a single stock.
REFERENCE_PARAMS = KouParams(
    mu=-0.2438, sigma=0.2579, lam=2.0, p=0.0062, eta1=1.0879, eta2=0.2435, alpha=0.2
)


class ReturnSample(ArrayModel):
    """Daily log returns with their time step in years."""

    values: FloatArray
    dt: float = Field(..., gt=0.0)

    @field_validator("values")
    @classmethod
    def check_values(cls, v: np.ndarray) -> np.ndarray:
        v = np.array(v, dtype=np.float64).ravel()
        if not np.all(np.isfinite(v)):
            raise ValueError("return sample contains non-finite values")
        v.setflags(write=False)
        return v

    def __len__(self) -> int:
        return int(self.values.size)

"""
Schemas for the recurrent policy network and its optimizer.
"""
from typing import Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from app.schemas.base import ArrayModel, FloatArray

# Row-block order inside the stacked gate matrices.
GATES: Tuple[str, ...] = ("F", "I", "O", "h")


class LstmWeights(ArrayModel):
    """Gate matrices stacked row-wise in GATES order.

    q: (4H, d) input maps, r: (4H, H) recurrent maps, b: (4H,) biases.
    """

    q: FloatArray
    r: FloatArray
    b: FloatArray

    @model_validator(mode="after")
    def check_shapes(self) -> "LstmWeights":
        if self.q.ndim != 2 or self.q.shape[0] % 4:
            raise ValueError("q must be (4 * hidden_size, input_size)")
        h = self.q.shape[0] // 4
        if self.r.shape != (4 * h, h):
            raise ValueError(f"r must be {(4 * h, h)}, got {self.r.shape}")
        if self.b.shape != (4 * h,):
            raise ValueError(f"b must be {(4 * h,)}, got {self.b.shape}")
        for name in ("q", "r", "b"):
            if not np.all(np.isfinite(getattr(self, name))):
                raise ValueError(f"{name} contains non-finite values")
        return self

    @property
    def hidden_size(self) -> int:
        return self.q.shape[0] // 4

    @property
    def input_size(self) -> int:
        return self.q.shape[1]


class LstmState(ArrayModel):
    """Recurrent pair: memory h and emitted signal c."""

    h: FloatArray
    c: FloatArray

    @classmethod
    def zeros(cls, hidden_size: int, batch: int = None) -> "LstmState":
        shape = (hidden_size,) if batch is None else (batch, hidden_size)
        return cls(h=np.zeros(shape), c=np.zeros(shape))


class HeadWeights(ArrayModel):
    """Affine maps hidden_size -> 1 for the investment and consumption heads."""

    theta_w: FloatArray
    theta_b: float = 0.0
    c_w: FloatArray
    c_b: float = 0.0

    @model_validator(mode="after")
    def check_shapes(self) -> "HeadWeights":
        if self.theta_w.ndim != 1 or self.theta_w.shape != self.c_w.shape:
            raise ValueError("head weights must be vectors of length hidden_size")
        if not (np.all(np.isfinite(self.theta_w)) and np.all(np.isfinite(self.c_w))):
            raise ValueError("head weights contain non-finite values")
        return self

    @property
    def hidden_size(self) -> int:
        return int(self.theta_w.shape[0])

    def stacked(self) -> Tuple[np.ndarray, np.ndarray]:
        """(H, 2) weight matrix and (2,) bias, theta column first."""
        return np.stack([self.theta_w, self.c_w], axis=1), np.array([self.theta_b, self.c_b])


class FeatureScaling(ArrayModel):
    """Fixed affine standardisation (x - shift) / scale of the policy inputs."""

    shift: FloatArray
    scale: FloatArray

    @field_validator("scale")
    @classmethod
    def check_scale(cls, v: np.ndarray) -> np.ndarray:
        if np.any(v <= 0.0):
            raise ValueError("scale must be positive")
        return v


class PolicyOutput(ArrayModel):
    """Per-step investment rate theta_t in (0, 1) and raw consumption >= 0."""

    theta: FloatArray
    c_raw: FloatArray


class AdamHyper(BaseModel):
    model_config = ConfigDict(frozen=True)

    alpha: float = Field(default=1e-3, gt=0.0)
    beta1: float = Field(default=0.9, ge=0.0, lt=1.0)
    beta2: float = Field(default=0.999, ge=0.0, lt=1.0)
    epsilon: float = Field(default=1e-8, ge=0.0)


class AdamState(ArrayModel):
    """Moment accumulators, step counter and hyper-parameters."""

    m: FloatArray
    v: FloatArray
    t: int = Field(default=0, ge=0)
    hyper: AdamHyper = AdamHyper()

    @model_validator(mode="after")
    def check_moments(self) -> "AdamState":
        if self.m.shape != self.v.shape:
            raise ValueError("m and v must share a shape")
        if np.any(self.v < 0.0):
            raise ValueError("second moment must be non-negative")
        return self

    @classmethod
    def fresh(cls, size: int, hyper: AdamHyper = None) -> "AdamState":
        return cls(m=np.zeros(size), v=np.zeros(size), t=0, hyper=hyper or AdamHyper())


class PolicyCheckpoint(ArrayModel):
    """Everything needed to rebuild a trained policy."""

    lstm: LstmWeights
    heads: HeadWeights
    scaling: FeatureScaling

    @model_validator(mode="after")
    def check_sizes(self) -> "PolicyCheckpoint":
        if self.heads.hidden_size != self.lstm.hidden_size:
            raise ValueError("head and LSTM hidden sizes differ")
        if self.scaling.shift.shape != (self.lstm.input_size,):
            raise ValueError("feature scaling does not match the LSTM input size")
        return self

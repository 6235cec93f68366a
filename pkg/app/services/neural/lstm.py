"""
Recurrent policy network: gate recurrence, output heads, checkpoints.
"""
import json
from pathlib import Path
from typing import List, Optional, Tuple, Union

import numpy as np

from app.core.exceptions import ShapeError
from app.schemas.neural import (
    FeatureScaling,
    HeadWeights,
    LstmState,
    LstmWeights,
    PolicyCheckpoint,
    PolicyOutput,
)
from app.services.neural.tensor import Tensor, lstm_cell, no_grad, parameter, stack, value


def init_weights(
    input_size: int, hidden_size: int, rng: np.random.Generator
) -> Tuple[LstmWeights, HeadWeights]:
    """Uniform(-k, k) matrices with k = 1 / sqrt(hidden_size), zero biases."""
    k = 1.0 / np.sqrt(hidden_size)
    q = rng.uniform(-k, k, size=(4 * hidden_size, input_size))
    r = rng.uniform(-k, k, size=(4 * hidden_size, hidden_size))
    lstm = LstmWeights(q=q, r=r, b=np.zeros(4 * hidden_size))
    heads = HeadWeights(
        theta_w=rng.uniform(-k, k, size=hidden_size),
        c_w=rng.uniform(-k, k, size=hidden_size),
    )
    return lstm, heads


def _check_shapes(x: np.ndarray, state: LstmState, w: LstmWeights) -> None:
    if x.shape[-1] != w.input_size:
        raise ShapeError(f"input has {x.shape[-1]} features, weights expect {w.input_size}")
    if state.h.shape[-1] != w.hidden_size or state.c.shape != state.h.shape:
        raise ShapeError(f"state shape {state.h.shape} does not match hidden size {w.hidden_size}")


def lstm_step(x, state: LstmState, w: LstmWeights) -> LstmState:
    """Advance the gate recurrence by one step."""
    x = np.asarray(x, dtype=np.float64)
    _check_shapes(x, state, w)
    with no_grad():
        out = lstm_cell(x, state.h, state.c, w.q, w.r, w.b).data
    h = w.hidden_size
    return LstmState(h=out[..., :h], c=out[..., h:])


class PolicyNetwork:
    """LSTM plus the investment-rate and consumption heads.

    Parameters live as leaf tensors so the same object serves plain
    evaluation and gradient-based training.
    """

    def __init__(self, lstm: LstmWeights, heads: HeadWeights, scaling: Optional[FeatureScaling] = None):
        if heads.hidden_size != lstm.hidden_size:
            raise ShapeError("head and LSTM hidden sizes differ")
        self.hidden_size = lstm.hidden_size
        self.input_size = lstm.input_size
        head_w, head_b = heads.stacked()
        self.q = parameter(lstm.q, "lstm.q")
        self.r = parameter(lstm.r, "lstm.r")
        self.b = parameter(lstm.b, "lstm.b")
        self.head_w = parameter(head_w, "heads.w")
        self.head_b = parameter(head_b, "heads.b")
        self.scaling = scaling or FeatureScaling(
            shift=np.zeros(self.input_size), scale=np.ones(self.input_size)
        )

    @classmethod
    def initialize(
        cls, input_size: int, hidden_size: int, seed: int, scaling: Optional[FeatureScaling] = None
    ) -> "PolicyNetwork":
        lstm, heads = init_weights(input_size, hidden_size, np.random.default_rng(seed))
        return cls(lstm, heads, scaling)

    @classmethod
    def from_checkpoint(cls, ckpt: PolicyCheckpoint) -> "PolicyNetwork":
        return cls(ckpt.lstm, ckpt.heads, ckpt.scaling)

    def parameters(self) -> List[Tensor]:
        return [self.q, self.r, self.b, self.head_w, self.head_b]

    @property
    def lstm_weights(self) -> LstmWeights:
        return LstmWeights(q=self.q.data, r=self.r.data, b=self.b.data)

    @property
    def head_weights(self) -> HeadWeights:
        w, b = self.head_w.data, self.head_b.data
        return HeadWeights(theta_w=w[:, 0], theta_b=float(b[0]), c_w=w[:, 1], c_b=float(b[1]))

    def checkpoint(self) -> PolicyCheckpoint:
        return PolicyCheckpoint(lstm=self.lstm_weights, heads=self.head_weights, scaling=self.scaling)

    def initial_state(self, batch: Optional[int] = None) -> Tuple[Tensor, Tensor]:
        shape = (self.hidden_size,) if batch is None else (batch, self.hidden_size)
        return Tensor(np.zeros(shape)), Tensor(np.zeros(shape))

    def step(self, x, h: Tensor, c: Tensor) -> Tuple[Tensor, Tensor, Tensor, Tensor]:
        """One causal step: (theta_t, c_raw_t, h_t, c_t) from standardised input x."""
        state = lstm_cell(x, h, c, self.q, self.r, self.b)
        H = self.hidden_size
        h_new, c_new = state[..., :H], state[..., H:]
        heads = h_new @ self.head_w + self.head_b
        theta = heads[..., 0].sigmoid()
        c_raw = heads[..., 1].relu()
        return theta, c_raw, h_new, c_new

    def forward(self, features) -> Tuple[Tensor, Tensor]:
        """Unroll over raw features of shape (T, d) or (batch, T, d)."""
        f = np.asarray(value(features), dtype=np.float64)
        if f.ndim not in (2, 3) or f.shape[-1] != self.input_size:
            raise ShapeError(f"features must be (T, {self.input_size}) or (batch, T, {self.input_size})")
        if f.shape[-2] < 1:
            raise ShapeError("need at least one step")
        x = (f - self.scaling.shift) / self.scaling.scale
        batch = None if f.ndim == 2 else f.shape[0]
        h, c = self.initial_state(batch)
        thetas, c_raws = [], []
        for t in range(f.shape[-2]):
            theta, c_raw, h, c = self.step(x[..., t, :], h, c)
            thetas.append(theta)
            c_raws.append(c_raw)
        return stack(thetas, axis=-1), stack(c_raws, axis=-1)


def policy_forward(features, w: LstmWeights, heads: HeadWeights) -> PolicyOutput:
    """theta_t = sigmoid(theta_head(h_t)), c_raw_t = relu(c_head(h_t)) for every step.

    ``features`` are used as given (no standardisation).
    """
    net = PolicyNetwork(w, heads)
    with no_grad():
        theta, c_raw = net.forward(features)
    return PolicyOutput(theta=theta.data, c_raw=c_raw.data)


# ------------------------------------------------------------- checkpoints
def checkpoint_to_dict(ckpt: PolicyCheckpoint) -> dict:
    """Flat JSON-ready form with a shape manifest.

    Python's float repr round-trips exactly, so save/load is bit-exact.
    """
    arrays = {
        "lstm.q": ckpt.lstm.q,
        "lstm.r": ckpt.lstm.r,
        "lstm.b": ckpt.lstm.b,
        "heads.theta_w": ckpt.heads.theta_w,
        "heads.theta_b": np.array([ckpt.heads.theta_b]),
        "heads.c_w": ckpt.heads.c_w,
        "heads.c_b": np.array([ckpt.heads.c_b]),
        "scaling.shift": ckpt.scaling.shift,
        "scaling.scale": ckpt.scaling.scale,
    }
    return {
        "format": "wdra-policy/1",
        "manifest": {k: list(np.shape(v)) for k, v in arrays.items()},
        "values": {k: [float(x) for x in np.ravel(v)] for k, v in arrays.items()},
    }


def checkpoint_from_dict(data: dict) -> PolicyCheckpoint:
    manifest, values = data["manifest"], data["values"]

    def arr(name: str) -> np.ndarray:
        flat = np.asarray(values[name], dtype=np.float64)
        shape = tuple(manifest[name])
        if flat.size != int(np.prod(shape)):
            raise ShapeError(f"checkpoint block '{name}' has {flat.size} values, manifest says {shape}")
        return flat.reshape(shape)

    return PolicyCheckpoint(
        lstm=LstmWeights(q=arr("lstm.q"), r=arr("lstm.r"), b=arr("lstm.b")),
        heads=HeadWeights(
            theta_w=arr("heads.theta_w"),
            theta_b=float(arr("heads.theta_b")[0]),
            c_w=arr("heads.c_w"),
            c_b=float(arr("heads.c_b")[0]),
        ),
        scaling=FeatureScaling(shift=arr("scaling.shift"), scale=arr("scaling.scale")),
    )


def save_checkpoint(ckpt: PolicyCheckpoint, path: Union[str, Path]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(checkpoint_to_dict(ckpt)))
    return path


def load_checkpoint(path: Union[str, Path]) -> PolicyCheckpoint:
    return checkpoint_from_dict(json.loads(Path(path).read_text()))

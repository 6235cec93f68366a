"""
Adaptive Moment Estimation.

``adam_step`` is the pure update on flat vectors; ``AdamOptimizer`` keeps the
state for a list of parameter tensors and is what calibration and training
use.
"""
from typing import List, Optional, Sequence, Tuple

import numpy as np

from app.core.exceptions import NonFiniteGradientError, ShapeError
from app.schemas.neural import AdamHyper, AdamState
from app.services.neural.tensor import Tensor


class ParameterLayout:
    """Named blocks of a flat parameter vector."""

    def __init__(self, names: Sequence[str], shapes: Sequence[Tuple[int, ...]]):
        if len(names) != len(shapes):
            raise ValueError("names and shapes differ in length")
        self.names = list(names)
        self.shapes = [tuple(s) for s in shapes]
        self.sizes = [int(np.prod(s)) for s in self.shapes]
        self.offsets = np.concatenate([[0], np.cumsum(self.sizes)]).astype(int)

    @classmethod
    def of(cls, tensors: Sequence[Tensor]) -> "ParameterLayout":
        names = [t.name or f"param_{i}" for i, t in enumerate(tensors)]
        return cls(names, [t.shape for t in tensors])

    @property
    def size(self) -> int:
        return int(self.offsets[-1])

    def flatten(self, arrays: Sequence[np.ndarray]) -> np.ndarray:
        return np.concatenate([np.ravel(np.asarray(a, dtype=np.float64)) for a in arrays])

    def unflatten(self, flat: np.ndarray) -> List[np.ndarray]:
        return [
            flat[self.offsets[i] : self.offsets[i + 1]].reshape(shape)
            for i, shape in enumerate(self.shapes)
        ]

    def block_of(self, index: int) -> str:
        k = int(np.searchsorted(self.offsets, index, side="right")) - 1
        return self.names[k]


def adam_step(
    params: np.ndarray,
    grads: np.ndarray,
    state: AdamState,
    layout: Optional[ParameterLayout] = None,
) -> Tuple[np.ndarray, AdamState]:
    """One bias-corrected Adam update; returns new arrays, inputs untouched."""
    params = np.asarray(params, dtype=np.float64)
    grads = np.asarray(grads, dtype=np.float64)
    if params.shape != grads.shape or params.shape != state.m.shape:
        raise ShapeError(f"shape mismatch: params {params.shape}, grads {grads.shape}, state {state.m.shape}")

    bad = ~np.isfinite(grads)
    if bad.any():
        first = int(np.flatnonzero(bad.ravel())[0])
        block = layout.block_of(first) if layout is not None else None
        where = f" in block '{block}'" if block else f" at index {first}"
        raise NonFiniteGradientError(f"non-finite gradient{where}", block=block)

    hp = state.hyper
    t = state.t + 1
    m = hp.beta1 * state.m + (1.0 - hp.beta1) * grads
    v = hp.beta2 * state.v + (1.0 - hp.beta2) * grads * grads
    m_hat = m / (1.0 - hp.beta1**t)
    v_hat = v / (1.0 - hp.beta2**t)
    denom = np.sqrt(v_hat) + hp.epsilon
    step = np.divide(m_hat, denom, out=np.zeros_like(m_hat), where=denom > 0.0)
    new_params = params - hp.alpha * step
    return new_params, AdamState(m=m, v=v, t=t, hyper=hp)


class AdamOptimizer:
    """Adam over a list of leaf tensors."""

    def __init__(self, params: Sequence[Tensor], hyper: AdamHyper = None):
        self.params = list(params)
        self.layout = ParameterLayout.of(self.params)
        self.state = AdamState.fresh(self.layout.size, hyper or AdamHyper())

    @property
    def t(self) -> int:
        return self.state.t

    def zero_grad(self) -> None:
        for p in self.params:
            p.zero_grad()

    def flat_grads(self) -> np.ndarray:
        return self.layout.flatten(
            [p.grad if p.grad is not None else np.zeros(p.shape) for p in self.params]
        )

    def step(self) -> None:
        flat = self.layout.flatten([p.data for p in self.params])
        flat, self.state = adam_step(flat, self.flat_grads(), self.state, self.layout)
        for p, new in zip(self.params, self.layout.unflatten(flat)):
            p.data = new.copy()

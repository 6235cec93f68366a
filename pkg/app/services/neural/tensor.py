"""
Reverse-mode automatic differentiation over numpy arrays.

A ``Tensor`` wraps a float64 array and, when it takes part in a graph that
needs gradients, remembers its parents and a closure mapping the output
adjoint to one adjoint per parent. ``Tensor.backward`` walks the graph in
reverse topological order (iteratively, so graphs unrolled over hundreds of
steps do not hit the recursion limit) and accumulates ``.grad`` on leaves.

The op set is small on purpose: arithmetic with broadcasting, matmul,
elementwise sigmoid/tanh/relu/exp/log/power, clipping, reductions,
indexing, stacking, log-normal-CDF and logsumexp, plus two fused
primitives with hand-derived adjoints (an LSTM cell step and the CRRA
utility) that keep the tape short when unrolling over a full year of
daily steps.
"""
import threading
from contextlib import contextmanager
from typing import Callable, Iterable, Optional, Sequence, Tuple, Union

import numpy as np
from scipy import special

ArrayLike = Union["Tensor", np.ndarray, float, int]

_LOG_SQRT_2PI = 0.5 * np.log(2.0 * np.pi)
# |rho - 1| below this switches the CRRA utility to its log branch
LOG_BRANCH_TOL = 1e-6

_state = threading.local()


def is_grad_enabled() -> bool:
    return getattr(_state, "enabled", True)


@contextmanager
def no_grad():
    """Evaluate without recording a graph (thread-local)."""
    previous = is_grad_enabled()
    _state.enabled = False
    try:
        yield
    finally:
        _state.enabled = previous


def _unbroadcast(grad: np.ndarray, shape: Tuple[int, ...]) -> np.ndarray:
    """Sum ``grad`` down to ``shape`` after numpy broadcasting."""
    if grad.shape == shape:
        return grad
    while grad.ndim > len(shape):
        grad = grad.sum(axis=0)
    for axis, size in enumerate(shape):
        if size == 1 and grad.shape[axis] != 1:
            grad = grad.sum(axis=axis, keepdims=True)
    return grad.reshape(shape)


def _is_basic_index(idx) -> bool:
    items = idx if isinstance(idx, tuple) else (idx,)
    return all(isinstance(i, (slice, int, np.integer)) or i is Ellipsis or i is None for i in items)


class Tensor:
    """A float64 array with an optional gradient tape entry."""

    __slots__ = ("data", "grad", "requires_grad", "name", "_parents", "_backward")

    # make ndarray <op> Tensor defer to the Tensor's reflected operator
    __array_ufunc__ = None

    def __init__(self, data, requires_grad: bool = False, name: Optional[str] = None):
        self.data = np.asarray(data, dtype=np.float64)
        self.grad: Optional[np.ndarray] = None
        self.requires_grad = requires_grad
        self.name = name
        self._parents: Tuple["Tensor", ...] = ()
        self._backward: Optional[Callable[[np.ndarray], Sequence[Optional[np.ndarray]]]] = None

    # ------------------------------------------------------------------ basics
    @property
    def shape(self) -> Tuple[int, ...]:
        return self.data.shape

    @property
    def ndim(self) -> int:
        return self.data.ndim

    def item(self) -> float:
        return float(self.data)

    def zero_grad(self) -> None:
        self.grad = None

    def __len__(self) -> int:
        return len(self.data)

    def __repr__(self) -> str:
        label = f", name={self.name!r}" if self.name else ""
        return f"Tensor(shape={self.data.shape}, requires_grad={self.requires_grad}{label})"

    # --------------------------------------------------------------- backward
    def backward(self, grad: Optional[np.ndarray] = None) -> None:
        """Accumulate d(self)/d(leaf) into every leaf's ``.grad``."""
        if not self.requires_grad:
            raise RuntimeError("backward() on a tensor that does not require grad")
        if grad is None:
            if self.data.size != 1:
                raise RuntimeError("backward() without a seed needs a scalar output")
            grad = np.ones_like(self.data)

        order = []
        seen = set()
        stack = [(self, False)]
        while stack:
            node, expanded = stack.pop()
            if expanded:
                order.append(node)
                continue
            if id(node) in seen:
                continue
            seen.add(id(node))
            stack.append((node, True))
            for parent in node._parents:
                if parent.requires_grad and id(parent) not in seen:
                    stack.append((parent, False))

        grads = {id(self): np.asarray(grad, dtype=np.float64)}
        for node in reversed(order):
            g = grads.pop(id(node), None)
            if g is None:
                continue
            if node._backward is None:
                node.grad = g.copy() if node.grad is None else node.grad + g
                continue
            for parent, pg in zip(node._parents, node._backward(g)):
                if pg is None or not parent.requires_grad:
                    continue
                pg = _unbroadcast(np.asarray(pg, dtype=np.float64), parent.data.shape)
                key = id(parent)
                if key in grads:
                    grads[key] = grads[key] + pg
                else:
                    grads[key] = pg

    # ------------------------------------------------------------- arithmetic
    def __add__(self, other: ArrayLike) -> "Tensor":
        other = lift(other)
        return _node(self.data + other.data, (self, other), lambda g: (g, g))

    __radd__ = __add__

    def __sub__(self, other: ArrayLike) -> "Tensor":
        other = lift(other)
        return _node(self.data - other.data, (self, other), lambda g: (g, -g))

    def __rsub__(self, other: ArrayLike) -> "Tensor":
        return lift(other) - self

    def __neg__(self) -> "Tensor":
        return _node(-self.data, (self,), lambda g: (-g,))

    def __mul__(self, other: ArrayLike) -> "Tensor":
        other = lift(other)
        a, b = self.data, other.data
        return _node(a * b, (self, other), lambda g: (g * b, g * a))

    __rmul__ = __mul__

    def __truediv__(self, other: ArrayLike) -> "Tensor":
        other = lift(other)
        a, b = self.data, other.data
        return _node(a / b, (self, other), lambda g: (g / b, -g * a / (b * b)))

    def __rtruediv__(self, other: ArrayLike) -> "Tensor":
        return lift(other) / self

    def __pow__(self, exponent: float) -> "Tensor":
        if isinstance(exponent, Tensor):
            raise TypeError("only constant exponents are supported")
        a = self.data
        e = float(exponent)
        return _node(a**e, (self,), lambda g: (g * e * a ** (e - 1.0),))

    def __matmul__(self, other: ArrayLike) -> "Tensor":
        return matmul(self, other)

    def __rmatmul__(self, other: ArrayLike) -> "Tensor":
        return matmul(other, self)

    def __getitem__(self, idx) -> "Tensor":
        shape = self.data.shape
        basic = _is_basic_index(idx)

        def backward(g):
            full = np.zeros(shape)
            if basic:
                full[idx] = g
            else:
                np.add.at(full, idx, g)
            return (full,)

        return _node(self.data[idx], (self,), backward)

    # ------------------------------------------------------------ elementwise
    def exp(self) -> "Tensor":
        out = np.exp(self.data)
        return _node(out, (self,), lambda g: (g * out,))

    def log(self) -> "Tensor":
        a = self.data
        return _node(np.log(a), (self,), lambda g: (g / a,))

    def sigmoid(self) -> "Tensor":
        out = special.expit(self.data)
        return _node(out, (self,), lambda g: (g * out * (1.0 - out),))

    def tanh(self) -> "Tensor":
        out = np.tanh(self.data)
        return _node(out, (self,), lambda g: (g * (1.0 - out * out),))

    def relu(self) -> "Tensor":
        mask = self.data > 0.0
        return _node(np.where(mask, self.data, 0.0), (self,), lambda g: (g * mask,))

    def clamp_min(self, floor: float) -> "Tensor":
        """max(floor, x); the floored branch passes a zero subgradient."""
        mask = self.data > floor
        return _node(np.where(mask, self.data, floor), (self,), lambda g: (g * mask,))

    def clip(self, lo: float, hi: float) -> "Tensor":
        mask = (self.data >= lo) & (self.data <= hi)
        return _node(np.clip(self.data, lo, hi), (self,), lambda g: (g * mask,))

    def log_ndtr(self) -> "Tensor":
        """log of the standard normal CDF, accurate far into the lower tail."""
        z = self.data
        out = special.log_ndtr(z)

        def backward(g):
            return (g * np.exp(-0.5 * z * z - _LOG_SQRT_2PI - out),)

        return _node(out, (self,), backward)

    # ------------------------------------------------------------- reductions
    def sum(self, axis: Optional[int] = None, keepdims: bool = False) -> "Tensor":
        shape = self.data.shape

        def backward(g):
            if axis is not None and not keepdims:
                g = np.expand_dims(g, axis)
            return (np.broadcast_to(g, shape),)

        return _node(self.data.sum(axis=axis, keepdims=keepdims), (self,), backward)

    def mean(self, axis: Optional[int] = None, keepdims: bool = False) -> "Tensor":
        n = self.data.size if axis is None else self.data.shape[axis]
        return self.sum(axis=axis, keepdims=keepdims) * (1.0 / n)

    def logsumexp(self, axis: int = 0) -> "Tensor":
        a = self.data
        out = special.logsumexp(a, axis=axis)

        def backward(g):
            weights = np.exp(a - np.expand_dims(out, axis))
            return (np.expand_dims(g, axis) * weights,)

        return _node(out, (self,), backward)


def _node(data: np.ndarray, parents: Tuple[Tensor, ...], backward) -> Tensor:
    out = Tensor(data)
    if is_grad_enabled() and any(p.requires_grad for p in parents):
        out.requires_grad = True
        out._parents = parents
        out._backward = backward
    return out


def lift(x: ArrayLike) -> Tensor:
    return x if isinstance(x, Tensor) else Tensor(x)


def parameter(data, name: Optional[str] = None) -> Tensor:
    """A leaf that collects gradients."""
    return Tensor(np.array(data, dtype=np.float64), requires_grad=True, name=name)


def value(x: ArrayLike):
    """Plain numpy value of a tensor or array-like."""
    return x.data if isinstance(x, Tensor) else np.asarray(x, dtype=np.float64)


# ---------------------------------------------------------------- functions
def matmul(a: ArrayLike, b: ArrayLike) -> Tensor:
    a, b = lift(a), lift(b)
    A, B = a.data, b.data

    def backward(g):
        if A.ndim == 1 and B.ndim == 1:
            return g * B, g * A
        if A.ndim == 1:
            return B @ g, np.outer(A, g)
        if B.ndim == 1:
            return np.outer(g, B), A.T @ g
        return g @ B.T, A.T @ g

    return _node(A @ B, (a, b), backward)


def stack(tensors: Iterable[ArrayLike], axis: int = 0) -> Tensor:
    items = [lift(t) for t in tensors]

    def backward(g):
        return [np.take(g, i, axis=axis) for i in range(len(items))]

    return _node(np.stack([t.data for t in items], axis=axis), tuple(items), backward)


def concat(tensors: Iterable[ArrayLike], axis: int = 0) -> Tensor:
    items = [lift(t) for t in tensors]
    sizes = np.cumsum([t.data.shape[axis] for t in items])[:-1]

    def backward(g):
        return np.split(g, sizes, axis=axis)

    return _node(np.concatenate([t.data for t in items], axis=axis), tuple(items), backward)


def where(mask: np.ndarray, a: ArrayLike, b: ArrayLike) -> Tensor:
    a, b = lift(a), lift(b)
    mask = np.asarray(mask, dtype=bool)
    return _node(
        np.where(mask, a.data, b.data),
        (a, b),
        lambda g: (np.where(mask, g, 0.0), np.where(mask, 0.0, g)),
    )


# ---------------------------------------------------------- fused primitives
def crra(x: ArrayLike, rho: ArrayLike) -> Tensor:
    """(x**(1 - rho) - 1) / (1 - rho), log(x) when |rho - 1| < LOG_BRANCH_TOL.

    Differentiable in both x and rho; x must be positive.
    """
    x, rho = lift(x), lift(rho)
    xv, rv = np.broadcast_arrays(x.data, rho.data)
    a = 1.0 - rv
    near_log = np.abs(a) < LOG_BRANCH_TOL
    a_safe = np.where(near_log, 1.0, a)
    lx = np.log(xv)
    power = np.exp(a_safe * lx)
    out = np.where(near_log, lx, np.expm1(a_safe * lx) / a_safe)

    def backward(g):
        dx = np.exp(-rv * lx)
        # d/d(rho) = -d/da; at a -> 0 the limit is -(log x)**2 / 2
        drho = np.where(near_log, -0.5 * lx * lx, -(power * lx - out) / a_safe)
        return g * dx, g * drho

    return _node(out, (x, rho), backward)


def lstm_cell(x: ArrayLike, h_prev: ArrayLike, c_prev: ArrayLike, q: Tensor, r: Tensor, b: Tensor) -> Tensor:
    """One step of the gate recurrence, returned as concat([h_new, c_new], -1).

        F, I, O = sigmoid(Q_g x + R_g c_prev + b_g)
        h_new   = F * h_prev + I * tanh(Q_h x + R_h c_prev + b_h)
        c_new   = O * tanh(h_new)

    Gates are stacked row-wise in q, r, b as (F, I, O, h). Inputs may be
    vectors or (batch, features) matrices.
    """
    x, h_prev, c_prev = lift(x), lift(h_prev), lift(c_prev)
    q, r, b = lift(q), lift(r), lift(b)
    single = x.data.ndim == 1
    X = np.atleast_2d(x.data)
    Hp = np.atleast_2d(h_prev.data)
    Cp = np.atleast_2d(c_prev.data)
    Q, R, B = q.data, r.data, b.data
    H = R.shape[1]

    z = X @ Q.T + Cp @ R.T + B
    gates = special.expit(z[:, : 3 * H])
    F, I, O = gates[:, :H], gates[:, H : 2 * H], gates[:, 2 * H :]
    G = np.tanh(z[:, 3 * H :])
    h_new = F * Hp + I * G
    th = np.tanh(h_new)
    c_new = O * th
    out = np.concatenate([h_new, c_new], axis=1)

    def backward(g):
        g = np.atleast_2d(g)
        dh = g[:, :H] + g[:, H:] * O * (1.0 - th * th)
        dO = g[:, H:] * th
        dz = np.concatenate(
            [
                dh * Hp * F * (1.0 - F),
                dh * G * I * (1.0 - I),
                dO * O * (1.0 - O),
                dh * I * (1.0 - G * G),
            ],
            axis=1,
        )
        dx = dz @ Q
        dhp = dh * F
        dcp = dz @ R
        if single:
            dx, dhp, dcp = dx[0], dhp[0], dcp[0]
        return dx, dhp, dcp, dz.T @ X, dz.T @ Cp, dz.sum(axis=0)

    return _node(out[0] if single else out, (x, h_prev, c_prev, q, r, b), backward)

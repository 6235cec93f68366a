"""
CRRA and wealth-dependent risk-aversion utilities, and the Euler wealth step.

Every function accepts floats, numpy arrays or autodiff tensors. When any
argument is a ``Tensor`` the result is a ``Tensor`` that training can
differentiate; otherwise plain numbers come back.
"""
from typing import Optional, Tuple

import numpy as np

from app.core.exceptions import ParameterDomainError
from app.schemas.training import RiskAversionCoeffs, TrainConfig
from app.services.neural.tensor import Tensor, crra, no_grad

DEFAULT_CLIP = (0.2, 10.0)


def _is_tensor(*values) -> bool:
    return any(isinstance(v, Tensor) for v in values)


def _plain(out: np.ndarray):
    return float(out) if np.ndim(out) == 0 else out


def risk_aversion(
    W,
    coeffs: Optional[RiskAversionCoeffs] = None,
    clip: Tuple[float, float] = DEFAULT_CLIP,
):
    """rho(W) = b0 + b1 W + b2 W**3, clamped to ``clip``."""
    coeffs = coeffs or RiskAversionCoeffs()
    lo, hi = clip
    if isinstance(W, Tensor):
        return (W * coeffs.b1 + (W * W * W) * coeffs.b2 + coeffs.b0).clip(lo, hi)
    W = np.asarray(W, dtype=np.float64)
    return _plain(np.clip(coeffs.b0 + coeffs.b1 * W + coeffs.b2 * W**3, lo, hi))


def crra_utility(x, rho):
    """(x**(1 - rho) - 1) / (1 - rho); ln x when |rho - 1| < 1e-6."""
    if _is_tensor(x, rho):
        if np.any(x.data <= 0.0 if isinstance(x, Tensor) else np.asarray(x) <= 0.0):
            raise ParameterDomainError("utility argument must be positive", field="x")
        return crra(x, rho)
    x = np.asarray(x, dtype=np.float64)
    if np.any(x <= 0.0):
        raise ParameterDomainError("utility argument must be positive", field="x")
    with no_grad():
        return _plain(crra(x, rho).data)


def wdra_utility(x, w, config: TrainConfig, w_ref=None):
    """CRRA utility with the risk aversion set by the wealth ratio w / w_ref.

    ``w_ref`` defaults to ``config.w0``.
    """
    if isinstance(w, Tensor):
        if np.any(w.data <= 0.0):
            raise ParameterDomainError("wealth must be positive", field="w")
    elif np.any(np.asarray(w) <= 0.0):
        raise ParameterDomainError("wealth must be positive", field="w")
    ref = config.w0 if w_ref is None else w_ref
    rho = risk_aversion(w / ref, config.effective_coeffs, config.rho_clip)
    return crra_utility(x, rho)


def wealth_step(w, theta, c, s_now, s_next, r: float, dt: float, floor: float):
    """max(floor, w (1 + theta dS/S + (1 - theta) r dt) - c dt).

    The floored branch passes a zero subgradient.
    """
    ret = (np.asarray(s_next, dtype=np.float64) - s_now) / s_now
    grown = w * (1.0 + theta * ret + (1.0 - theta) * (r * dt)) - c * dt
    if isinstance(grown, Tensor):
        return grown.clamp_min(floor)
    return _plain(np.maximum(floor, grown))

"""
Double-exponential jump-diffusion: jump law, daily log-return density and
likelihood.

The one-day log return is approximated by

    (mu - sigma^2 / 2) dt + sigma sqrt(dt) Z + B Y,   B ~ Bernoulli(lambda dt)

so its density g is a three-way mixture: a Gaussian and two exponentially
modified Gaussians. g is evaluated in log space (``scipy.special.log_ndtr``
for the normal CDF factors, logsumexp across the three terms) so the
e^{...} * Phi(...) products never form inf * 0.
"""
import math
from typing import Tuple, Union

import numpy as np
from scipy import stats

from app.core.exceptions import ApproximationDomainError, ParameterDomainError
from app.schemas.kou import KouParams, ReturnSample
from app.services.neural.tensor import Tensor, lift, no_grad, stack

ArrayOrFloat = Union[float, np.ndarray]

_LOG_SQRT_2PI = 0.5 * math.log(2.0 * math.pi)


def validate_params(params: KouParams, require_diffusion: bool = False) -> None:
    """Re-check the domain (KouParams may have been built without validation)."""
    checks = (
        ("sigma", params.sigma > 0.0 if require_diffusion else params.sigma >= 0.0),
        ("lambda", params.lam >= 0.0),
        ("p", 0.0 <= params.p <= 1.0),
        ("eta1", params.eta1 > 1.0),
        ("eta2", params.eta2 > 0.0),
    )
    for field, ok in checks:
        if not ok:
            raise ParameterDomainError(f"{field} is outside its domain", field=field)
    for field in ("mu", "sigma", "lam", "p", "eta1", "eta2", "alpha"):
        if not math.isfinite(getattr(params, field)):
            raise ParameterDomainError(f"{field} is not finite", field=field)


def _check_approximation(params: KouParams, dt: float) -> None:
    if dt <= 0.0:
        raise ParameterDomainError("dt must be positive", field="dt")
    if params.lam * dt >= 1.0:
        raise ApproximationDomainError(
            f"lambda * dt = {params.lam * dt:.4g} >= 1; the one-jump-per-step density does not apply",
            field="lambda",
        )


def jump_size_density(y: ArrayOrFloat, params: KouParams) -> ArrayOrFloat:
    """p eta1 e^{-eta1 (y - alpha)} above alpha, q eta2 e^{eta2 (y - alpha)} below."""
    validate_params(params)
    y = np.asarray(y, dtype=np.float64)
    d = y - params.alpha
    upper = params.p * params.eta1 * np.exp(-params.eta1 * np.maximum(d, 0.0))
    lower = params.q * params.eta2 * np.exp(params.eta2 * np.minimum(d, 0.0))
    out = np.where(d >= 0.0, upper, lower)
    return float(out) if out.ndim == 0 else out


def jump_size_moments(params: KouParams) -> Tuple[float, float]:
    """Mean and variance of the shifted double-exponential jump U."""
    validate_params(params)
    p, q = params.p, params.q
    centered_mean = p / params.eta1 - q / params.eta2
    centered_second = 2.0 * p / params.eta1**2 + 2.0 * q / params.eta2**2
    return params.alpha + centered_mean, centered_second - centered_mean**2


def log_return_moments(params: KouParams, dt: float) -> Tuple[float, float]:
    """Analytic mean and variance of the one-step log return."""
    if dt <= 0.0:
        raise ParameterDomainError("dt must be positive", field="dt")
    mean_u, var_u = jump_size_moments(params)
    second_u = var_u + mean_u**2
    mean = (params.mu - 0.5 * params.sigma**2) * dt + params.lam * dt * mean_u
    variance = params.sigma**2 * dt + params.lam * dt * second_u
    return mean, variance


def log_density(x, mu, sigma, lam, p, eta1, eta2, alpha, dt: float) -> Tensor:
    """ln g(x) as a tensor expression; parameters may be tensors or floats.

    Shared by ``return_density`` (constants) and calibration (parameters
    carrying gradients).
    """
    x = np.asarray(x, dtype=np.float64)
    mu, sigma, lam, p, eta1, eta2, alpha = (lift(v) for v in (mu, sigma, lam, p, eta1, eta2, alpha))
    sqrt_dt = math.sqrt(dt)
    drift = (mu - sigma * sigma * 0.5) * dt
    s = sigma * sqrt_dt
    var = s * s
    log_s = s.log()
    z = x - drift
    gauss = (1.0 - lam * dt).log() - log_s - (z / s) ** 2 * 0.5 - _LOG_SQRT_2PI
    u = z - alpha
    log_jump = (lam * dt).log()
    up = (
        log_jump + p.log() + eta1.log() + eta1 * eta1 * var * 0.5 - eta1 * u
        + ((u - eta1 * var) / s).log_ndtr()
    )
    down = (
        log_jump + (1.0 - p).log() + eta2.log() + eta2 * eta2 * var * 0.5 + eta2 * u
        + (-(u + eta2 * var) / s).log_ndtr()
    )
    return stack([gauss, up, down], axis=0).logsumexp(axis=0)


def _log_density_values(x: np.ndarray, params: KouParams, dt: float) -> np.ndarray:
    with no_grad(), np.errstate(divide="ignore", invalid="ignore"):
        return log_density(
            x, params.mu, params.sigma, params.lam, params.p, params.eta1, params.eta2, params.alpha, dt
        ).data


def return_density(x: ArrayOrFloat, params: KouParams, dt: float) -> ArrayOrFloat:
    """g(x): density of the one-step log return under the Bernoulli jump approximation."""
    validate_params(params, require_diffusion=True)
    _check_approximation(params, dt)
    x = np.asarray(x, dtype=np.float64)
    if params.lam == 0.0:
        drift = (params.mu - 0.5 * params.sigma**2) * dt
        out = stats.norm.pdf(x, loc=drift, scale=params.sigma * math.sqrt(dt))
    else:
        out = np.exp(_log_density_values(np.atleast_1d(x), params, dt)).reshape(x.shape)
    return float(out) if out.ndim == 0 else out


def return_cdf(x: ArrayOrFloat, params: KouParams, dt: float) -> ArrayOrFloat:
    """CDF of g, using the exponentially-modified-normal law of each jump branch."""
    validate_params(params, require_diffusion=True)
    _check_approximation(params, dt)
    x = np.asarray(x, dtype=np.float64)
    drift = (params.mu - 0.5 * params.sigma**2) * dt
    s = params.sigma * math.sqrt(dt)
    w = params.lam * dt
    out = (1.0 - w) * stats.norm.cdf(x, loc=drift, scale=s)
    if w > 0.0:
        loc = drift + params.alpha
        up = stats.exponnorm.cdf(x, 1.0 / (s * params.eta1), loc=loc, scale=s)
        down = stats.exponnorm.sf(loc - x, 1.0 / (s * params.eta2), loc=0.0, scale=s)
        out = out + w * (params.p * up + params.q * down)
    return float(out) if out.ndim == 0 else out


def log_likelihood(sample: ReturnSample, params: KouParams) -> float:
    """Sum of ln g(x_i).

    Returns -inf (never NaN) when any point has zero density numerically.
    Summation is exactly rounded, so the value does not depend on the order
    of the sample.
    """
    if len(sample) == 0:
        raise ParameterDomainError("empty return sample", field="sample")
    validate_params(params, require_diffusion=True)
    _check_approximation(params, sample.dt)
    values = _log_density_values(sample.values, params, sample.dt)
    if not np.all(np.isfinite(values)):
        return -math.inf
    return math.fsum(values)

"""
Maximum-likelihood calibration of the jump-diffusion on daily log returns.

The seven parameters are optimised by Adam in an unconstrained space:

    mu, alpha   identity
    sigma, eta2 exp
    eta1        1 + exp
    p           logistic
    lambda      LAMBDA_CAP(dt) * logistic   (positive and keeps lambda*dt < 1)

Gradients come from the reverse-mode engine in ``app.services.neural``.
"""
import math
from typing import List, Optional, Tuple

import numpy as np
import pandas as pd
from scipy import special, stats

from app.core.exceptions import CalibrationInitError, ParameterDomainError
from app.core.logging import logger
from app.schemas.calibration import CalibrationConfig, CalibrationResult, TraceRow
from app.schemas.kou import PARAM_NAMES, KouParams, ReturnSample
from app.schemas.neural import AdamHyper
from app.services import kou_model
from app.services.neural.adam import AdamOptimizer
from app.services.neural.tensor import Tensor, parameter

LAMBDA_INDEX = PARAM_NAMES.index("lam")
# lambda never exceeds this fraction of 1/dt during optimisation
LAMBDA_CAP_FRACTION = 0.5
# lower bound for the outlier-based lambda seed, per year
LAMBDA_SEED_FLOOR = 0.1
_P_EPS = 1e-9


def lambda_cap(dt: float) -> float:
    return LAMBDA_CAP_FRACTION / dt


def estimate_lambda_init(sample: ReturnSample) -> float:
    """Annualised count of points more than 3 sample standard deviations from the mean."""
    n = len(sample)
    if n < 30:
        raise ParameterDomainError(f"need at least 30 returns to count outliers, got {n}", field="sample")
    x = sample.values
    mean = x.mean()
    sd = x.std(ddof=1)
    if not sd > 0.0:
        raise ParameterDomainError("return sample has zero variance", field="sample")
    n_outliers = int(np.count_nonzero(np.abs(x - mean) > 3.0 * sd))
    return n_outliers / (n * sample.dt)


def default_init(sample: ReturnSample, lambda_floor: float = LAMBDA_SEED_FLOOR) -> KouParams:
    """Starting point: diffusion moments of the 3-sigma-clipped sample, lambda from the outlier count.

    The outlier count is raised to ``lambda_floor`` so a free lambda does not start
    on the flat tail of its sigmoid; pass 0 to keep the raw count.
    """
    dt = sample.dt
    clipped = stats.sigmaclip(sample.values, 3.0, 3.0).clipped
    if clipped.size < 2 or not clipped.std(ddof=1) > 0.0:
        clipped = sample.values
    sd = float(clipped.std(ddof=1))
    sigma = sd / math.sqrt(dt)
    mu = float(clipped.mean()) / dt + 0.5 * sigma**2
    lam = min(max(estimate_lambda_init(sample), lambda_floor), 0.5 * lambda_cap(dt))
    return KouParams(mu=mu, sigma=sigma, lam=lam, p=0.5, eta1=2.0, eta2=1.0, alpha=0.0)


# ---------------------------------------------------------- reparameterisation
def to_unconstrained(params: KouParams, dt: float) -> np.ndarray:
    cap = lambda_cap(dt)
    lam = min(max(params.lam, 1e-12), cap * (1.0 - 1e-12))
    p = min(max(params.p, _P_EPS), 1.0 - _P_EPS)
    return np.array(
        [
            params.mu,
            math.log(params.sigma),
            special.logit(lam / cap),
            special.logit(p),
            math.log(params.eta1 - 1.0),
            math.log(params.eta2),
            params.alpha,
        ]
    )


def _constrained(raw: Tensor, dt: float) -> List[Tensor]:
    return [
        raw[0],
        raw[1].exp(),
        raw[2].sigmoid() * lambda_cap(dt),
        raw[3].sigmoid(),
        raw[4].exp() + 1.0,
        raw[5].exp(),
        raw[6],
    ]


def from_unconstrained(raw: np.ndarray, dt: float) -> KouParams:
    values = [t.item() for t in _constrained(Tensor(raw), dt)]
    return KouParams(**dict(zip(PARAM_NAMES, values)))


def log_likelihood_tensor(raw: Tensor, sample: ReturnSample) -> Tensor:
    """Total log-likelihood as a differentiable function of the raw vector."""
    params = _constrained(raw, sample.dt)
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        return kou_model.log_density(sample.values, *params, dt=sample.dt).sum()


def log_likelihood_and_grad(raw: np.ndarray, sample: ReturnSample) -> Tuple[float, np.ndarray]:
    """Log-likelihood and its exact gradient with respect to the raw vector."""
    leaf = parameter(raw, "raw")
    ll = log_likelihood_tensor(leaf, sample)
    ll.backward()
    return ll.item(), leaf.grad


def gradient_check(
    raw: np.ndarray, sample: ReturnSample, rel_step: float = 1e-6
) -> Tuple[np.ndarray, np.ndarray]:
    """Reverse-mode gradient next to central differences, step rel_step * max(1, |raw_i|)."""
    raw = np.asarray(raw, dtype=np.float64)
    _, analytic = log_likelihood_and_grad(raw, sample)
    numeric = np.empty_like(raw)
    for i in range(raw.size):
        h = rel_step * max(1.0, abs(raw[i]))
        up, down = raw.copy(), raw.copy()
        up[i] += h
        down[i] -= h
        f_up = log_likelihood_tensor(Tensor(up), sample).item()
        f_down = log_likelihood_tensor(Tensor(down), sample).item()
        numeric[i] = (f_up - f_down) / (2.0 * h)
    return analytic, numeric


def _offending_parameters(init: KouParams, sample: ReturnSample) -> List[str]:
    """Parameters whose replacement by the default start makes the likelihood finite."""
    try:
        fallback = default_init(sample)
    except ValueError:
        return list(PARAM_NAMES)
    names = []
    for name in PARAM_NAMES:
        trial = init.replace(**{name: getattr(fallback, name)})
        try:
            if math.isfinite(kou_model.log_likelihood(sample, trial)):
                names.append(name)
        except ValueError:
            continue
    return names or list(PARAM_NAMES)


def calibrate(sample: ReturnSample, config: Optional[CalibrationConfig] = None) -> CalibrationResult:
    """Maximise the log-likelihood with Adam; return the best-seen iterate."""
    config = config or CalibrationConfig()
    n = len(sample)
    if n == 0:
        raise ParameterDomainError("empty return sample", field="sample")

    # a frozen lambda stays at the raw outlier count
    init = config.init or default_init(sample, lambda_floor=0.0 if config.fix_lambda else LAMBDA_SEED_FLOOR)
    kou_model.validate_params(init, require_diffusion=True)
    if init.lam * sample.dt >= 1.0:
        raise CalibrationInitError("lambda * dt >= 1 at the starting point", parameters=["lam"])
    start_ll = kou_model.log_likelihood(sample, init)
    if not math.isfinite(start_ll):
        offending = _offending_parameters(init, sample)
        raise CalibrationInitError(
            f"log-likelihood is not finite at the starting point (check {', '.join(offending)})",
            parameters=offending,
        )

    raw = parameter(to_unconstrained(init, sample.dt), "kou_raw")
    opt = AdamOptimizer([raw], AdamHyper(alpha=config.learning_rate))
    logger.info(
        f"Calibrating on {n} returns: start ll={start_ll:.4f}, lr={config.learning_rate}, "
        f"max_iters={config.max_iters}, fix_lambda={config.fix_lambda}"
    )

    best_ll = -math.inf
    best_raw = raw.data.copy()
    trace: List[TraceRow] = []
    converged = False
    iterations = 0
    for it in range(config.max_iters):
        opt.zero_grad()
        ll_t = log_likelihood_tensor(raw, sample)
        ll = ll_t.item()
        if not math.isfinite(ll):
            logger.warning(f"Non-finite log-likelihood at iteration {it}; stopping at the best iterate")
            break
        iterations = it + 1
        if ll > best_ll:
            best_ll = ll
            best_raw = raw.data.copy()
        trace.append((it, ll, best_ll))

        if it >= config.patience:
            before = trace[it - config.patience][2]
            if abs(best_ll - before) <= config.tolerance * abs(before):
                converged = True
                break

        (ll_t * (-1.0 / n)).backward()
        if config.fix_lambda:
            raw.grad[LAMBDA_INDEX] = 0.0
        if not np.all(np.isfinite(raw.grad)):
            logger.warning(f"Non-finite gradient at iteration {it}; stopping at the best iterate")
            break
        opt.step()

        if it % 250 == 0:
            logger.debug(f"iter {it}: ll={ll:.4f} best={best_ll:.4f}")

    params = from_unconstrained(best_raw, sample.dt)
    if config.fix_lambda:
        params = params.replace(lam=init.lam)
    final_ll = kou_model.log_likelihood(sample, params)
    logger.info(
        f"Calibration {'converged' if converged else 'stopped'} after {iterations} iterations: "
        f"ll={final_ll:.4f}, sigma={params.sigma:.4f}, lambda={params.lam:.4f}"
    )
    return CalibrationResult(
        params=params,
        log_likelihood=final_ll,
        iterations=iterations,
        trace=trace,
        converged=converged,
    )


def density_report(params: KouParams, sample: ReturnSample, grid_size: int = 512) -> pd.DataFrame:
    """Model density next to a Gaussian KDE of the sample on a uniform grid."""
    if len(sample) == 0:
        raise ParameterDomainError("empty return sample", field="sample")
    if grid_size < 2:
        raise ParameterDomainError("grid_size must be at least 2", field="grid_size")
    x = sample.values
    sd = float(np.std(x, ddof=1)) if x.size > 1 else 0.0
    if not sd > 0.0:
        raise ParameterDomainError("KDE needs a sample with positive variance", field="sample")
    grid = np.linspace(x.min() - 3.0 * sd, x.max() + 3.0 * sd, grid_size)
    kde = stats.gaussian_kde(x, bw_method=1.06 * x.size ** (-0.2))
    return pd.DataFrame(
        {
            "x": grid,
            "model_density": kou_model.return_density(grid, params, sample.dt),
            "kde_density": kde(grid),
        }
    )

"""
Monte-Carlo price paths under the double-exponential jump-diffusion.

Each day's log increment is a Gaussian diffusion draw plus the sum of the
jumps whose arrival time floors to that day. Arrival times come from
accumulated Exp(lambda) inter-arrival gaps over [0, n_days * dt].

Every path owns an independent generator spawned from (seed, path index),
so adding paths never perturbs existing ones and the result does not depend
on how paths are scheduled across threads.
"""
from concurrent.futures import ThreadPoolExecutor
from typing import Optional, Tuple

import numpy as np

from app.core.config import settings
from app.core.logging import logger
from app.schemas.kou import KouParams, ReturnSample
from app.schemas.simulation import PathSet, SimConfig
from app.services.kou_model import validate_params


def path_rng(seed: int, index: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(index,)))


def _jump_increments(
    params: KouParams, config: SimConfig, rng: np.random.Generator
) -> Tuple[np.ndarray, int]:
    """Per-day sum of jump sizes and the number of jumps on one path."""
    out = np.zeros(config.n_days)
    if params.lam == 0.0:
        return out, 0
    horizon = config.horizon
    times = []
    t = rng.exponential(1.0 / params.lam)
    while t < horizon:
        times.append(t)
        t += rng.exponential(1.0 / params.lam)
    n_jumps = len(times)
    if n_jumps == 0:
        return out, 0
    days = np.minimum(np.floor(np.asarray(times) / config.dt).astype(int), config.n_days - 1)
    upward = rng.random(n_jumps) < params.p
    magnitude = rng.standard_exponential(n_jumps)
    sizes = params.alpha + np.where(upward, magnitude / params.eta1, -magnitude / params.eta2)
    # several jumps on one day add up
    np.add.at(out, days, sizes)
    return out, n_jumps


def _simulate_path(params: KouParams, config: SimConfig, index: int) -> Tuple[np.ndarray, int]:
    rng = path_rng(config.seed, index)
    drift = (params.mu - 0.5 * params.sigma**2) * config.dt
    diffusion = params.sigma * np.sqrt(config.dt)
    increments = drift + diffusion * rng.standard_normal(config.n_days)
    jumps, n_jumps = _jump_increments(params, config, rng)
    return increments + jumps, n_jumps


def simulate(params: KouParams, config: Optional[SimConfig] = None, threads: Optional[int] = None) -> PathSet:
    """Simulate ``config.n_paths`` price paths; column 0 holds s0 exactly."""
    config = config or SimConfig()
    validate_params(params)
    threads = threads or settings.THREADS

    def run(index: int) -> Tuple[np.ndarray, int]:
        return _simulate_path(params, config, index)

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(run, range(config.n_paths)))
    else:
        results = [run(i) for i in range(config.n_paths)]

    increments = np.stack([inc for inc, _ in results])
    counts = np.array([n for _, n in results], dtype=np.float64)
    prices = np.empty((config.n_paths, config.n_days + 1))
    prices[:, 0] = config.s0
    prices[:, 1:] = config.s0 * np.exp(np.cumsum(increments, axis=1))

    logger.info(
        f"Simulated {config.n_paths} paths x {config.n_days} days (seed={config.seed}, "
        f"threads={threads}); {int(counts.sum())} jumps"
    )
    return PathSet(prices=prices, seed=config.seed, params=params, dt=config.dt, jump_counts=counts)


def log_returns(paths: PathSet) -> np.ndarray:
    """ln(S_{k+1} / S_k) for every path and day."""
    prices = paths.prices
    return np.log(prices[:, 1:] / prices[:, :-1])


def paths_to_returns_sample(paths: PathSet) -> ReturnSample:
    """All daily log returns, path by path, as one calibration sample."""
    return ReturnSample(values=log_returns(paths).ravel(), dt=paths.dt)

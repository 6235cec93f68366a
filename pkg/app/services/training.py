"""
Monte-Carlo objective and the training loop for the recurrent policy.

At every day t the network sees (ln(S_t / S_0), w_t / w_0, t / T), emits an
investment rate theta_t in (0, 1) and a raw consumption rate; consumption is
that rate times current wealth. Wealth follows the floored Euler step. The
objective averages, over paths,

    zeta * sum_t e^{-eta t dt} u(c_t + c_floor, w_t) dt + (1 - zeta) e^{-eta T dt} u(w_T, w_T)

with u the CRRA or wealth-dependent utility selected by the config.
"""
import math
import time
from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np

from app.core.exceptions import ShapeError, TrainingDivergenceError
from app.core.logging import logger
from app.schemas.neural import AdamHyper, FeatureScaling
from app.schemas.simulation import PathSet
from app.schemas.training import TrainConfig, TrainReport, WealthPath
from app.services.neural.adam import AdamOptimizer
from app.services.neural.lstm import PolicyNetwork
from app.services.neural.tensor import Tensor, no_grad, stack
from app.services.utility import wdra_utility, wealth_step

N_FEATURES = 3


@dataclass
class Rollout:
    """Tensors produced by running a policy along a batch of paths."""

    w: List[Tensor] = field(default_factory=list)
    theta: List[Tensor] = field(default_factory=list)
    c: List[Tensor] = field(default_factory=list)
    per_path: Optional[Tensor] = None
    floor_hits: int = 0


def merton_fraction(mu: float, r: float, rho: float, sigma: float) -> float:
    """Optimal constant risky share (mu - r) / (rho sigma^2) for CRRA under GBM."""
    return (mu - r) / (rho * sigma**2)


def check_horizon(paths: PathSet, config: TrainConfig) -> None:
    if config.horizon is not None and config.horizon != paths.n_days:
        raise ShapeError(f"policy horizon {config.horizon} does not match {paths.n_days} days of paths")
    if not math.isclose(paths.dt, config.dt, rel_tol=1e-12):
        logger.warning(f"paths were simulated with dt={paths.dt}, training uses dt={config.dt}")


def feature_scaling(paths: PathSet) -> FeatureScaling:
    """Affine constants for (ln S_t/S_0, w_t/w_0, t/T).

    The price feature is centred on the training set; wealth is centred
    on 1; time is centred and scaled like a uniform on [0, 1].
    """
    log_rel = np.log(paths.prices[:, :-1] / paths.prices[:, :1])
    sd = float(log_rel.std())
    return FeatureScaling(
        shift=np.array([float(log_rel.mean()), 1.0, 0.5]),
        scale=np.array([sd if sd > 0.0 else 1.0, 1.0, 1.0 / math.sqrt(12.0)]),
    )


def rollout(prices: np.ndarray, network: PolicyNetwork, config: TrainConfig) -> Rollout:
    """Run the policy causally along each row of ``prices`` and score it."""
    n_paths, n_steps = prices.shape[0], prices.shape[1] - 1
    log_rel = np.log(prices / prices[:, :1])
    scaling = network.scaling
    floor = config.wealth_floor
    result = Rollout()

    w = Tensor(np.full(n_paths, config.w0))
    h, cell = network.initial_state(n_paths)
    step_utilities = []
    for t in range(n_steps):
        features = stack([log_rel[:, t], w * (1.0 / config.w0), np.full(n_paths, t / n_steps)], axis=-1)
        x = (features - scaling.shift) / scaling.scale
        theta, c_raw, h, cell = network.step(x, h, cell)
        c = c_raw * w
        w_ref = config.w0 if config.wealth_ref == "initial" else float(w.data.mean())
        step_utilities.append(wdra_utility(c + config.consumption_floor, w, config, w_ref))

        w_next = wealth_step(w, theta, c, prices[:, t], prices[:, t + 1], config.r, config.dt, floor)
        result.floor_hits += int(np.count_nonzero(w_next.data <= floor))
        result.w.append(w)
        result.theta.append(theta)
        result.c.append(c)
        w = w_next
    result.w.append(w)

    w_ref = config.w0 if config.wealth_ref == "initial" else float(w.data.mean())
    # terminal term discounted at T
    terminal_weight = (1.0 - config.zeta) * math.exp(-config.eta_discount * n_steps * config.dt)
    terminal = wdra_utility(w, w, config, w_ref) * terminal_weight
    if n_steps and config.zeta > 0.0:
        discount = np.exp(-config.eta_discount * np.arange(n_steps) * config.dt) * (config.zeta * config.dt)
        running = (stack(step_utilities, axis=-1) * discount).sum(axis=-1)
        result.per_path = running + terminal
    else:
        result.per_path = terminal
    return result


def objective(paths: PathSet, network: PolicyNetwork, config: TrainConfig) -> float:
    """Expected utility of the policy over all paths."""
    check_horizon(paths, config)
    with no_grad():
        per_path = rollout(paths.prices, network, config).per_path.data
    return float(per_path.mean())


def simulate_policy(paths: PathSet, network: PolicyNetwork, config: TrainConfig) -> WealthPath:
    """Wealth, theta and consumption of the policy along every path."""
    check_horizon(paths, config)
    with no_grad():
        run = rollout(paths.prices, network, config)
    return WealthPath(
        w=np.stack([t.data for t in run.w], axis=-1),
        theta=np.stack([t.data for t in run.theta], axis=-1),
        c=np.stack([t.data for t in run.c], axis=-1),
    )


def clipped_share(run: WealthPath, config: TrainConfig) -> float:
    """Fraction of wealth states whose unclipped risk aversion leaves ``rho_clip``."""
    coeffs = config.effective_coeffs
    W = run.w / config.w0
    rho = coeffs.b0 + coeffs.b1 * W + coeffs.b2 * W**3
    lo, hi = config.rho_clip
    return float(np.mean((rho < lo) | (rho > hi)))


def train(
    paths: PathSet, config: Optional[TrainConfig] = None, network: Optional[PolicyNetwork] = None
) -> TrainReport:
    """Minibatch Adam on the negative objective; one full-set evaluation per epoch."""
    config = config or TrainConfig()
    check_horizon(paths, config)
    network = network or PolicyNetwork.initialize(
        N_FEATURES, config.hidden_size, seed=config.seed, scaling=feature_scaling(paths)
    )
    optimizer = AdamOptimizer(network.parameters(), AdamHyper(alpha=config.learning_rate))
    rng = np.random.default_rng(config.seed)
    prices = paths.prices
    n_paths = paths.n_paths

    initial_utility = objective(paths, network, config)
    logger.info(
        f"Training {config.utility_mode} policy: {n_paths} paths x {paths.n_days} days, "
        f"batch={config.batch_size}, lr={config.learning_rate}, epochs={config.epochs}, "
        f"initial utility={initial_utility:.6f}"
    )

    trace: List[float] = []
    floor_hits = 0
    log_every = max(1, config.epochs // 20)
    for epoch in range(config.epochs):
        started = time.perf_counter()
        order = rng.permutation(n_paths)
        for batch, start in enumerate(range(0, n_paths, config.batch_size)):
            idx = order[start : start + config.batch_size]
            optimizer.zero_grad()
            run = rollout(prices[idx], network, config)
            bad = ~np.isfinite(run.per_path.data)
            if bad.any():
                path = int(idx[np.flatnonzero(bad)[0]])
                logger.error(f"non-finite objective at epoch {epoch}, batch {batch}, path {path}")
                raise TrainingDivergenceError(
                    "objective is not finite", epoch=epoch, batch=batch, path=path
                )
            floor_hits += run.floor_hits
            (-run.per_path.mean()).backward()
            optimizer.step()

        trace.append(objective(paths, network, config))
        if epoch % log_every == 0 or epoch == config.epochs - 1:
            logger.info(
                f"epoch {epoch + 1}/{config.epochs}: expected utility={trace[-1]:.6f} "
                f"({time.perf_counter() - started:.2f}s)"
            )

    if floor_hits:
        logger.warning(f"wealth hit the floor {floor_hits} times during training")
    final = simulate_policy(paths, network, config)
    share = clipped_share(final, config)
    if share > 0.0:
        lo, hi = config.rho_clip
        logger.warning(f"risk aversion clipped to [{lo}, {hi}] on {share:.1%} of final wealth states")
    return TrainReport(
        config=config,
        utility_trace=np.asarray(trace, dtype=np.float64),
        initial_utility=initial_utility,
        checkpoint=network.checkpoint(),
        paths=final,
        floor_hits=floor_hits,
    )

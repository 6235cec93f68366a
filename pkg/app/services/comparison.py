"""
Train a CRRA and a WDRA policy on the same paths and line up their outputs.
"""
import numpy as np

from app.core.logging import logger
from app.schemas.comparison import ComparisonReport, ComparisonSummary, Histogram, QuantileTrace
from app.schemas.simulation import PathSet
from app.schemas.training import TrainConfig, TrainReport
from app.services.training import train

N_BINS = 30


def shared_histogram(crra: np.ndarray, wdra: np.ndarray, bins: int = N_BINS) -> Histogram:
    """Counts of both samples over one set of edges spanning their union."""
    edges = np.histogram_bin_edges(np.concatenate([np.ravel(crra), np.ravel(wdra)]), bins=bins)
    return Histogram(
        edges=edges,
        crra=np.histogram(crra, bins=edges)[0].astype(np.float64),
        wdra=np.histogram(wdra, bins=edges)[0].astype(np.float64),
    )


def final_utility(report: TrainReport) -> float:
    trace = report.utility_trace
    return float(trace[-1]) if trace.size else report.initial_utility


def summarize(crra: TrainReport, wdra: TrainReport) -> ComparisonSummary:
    def cumulative_consumption(report: TrainReport) -> float:
        return float((report.consumption * report.config.dt).sum(axis=-1).mean())

    return ComparisonSummary(
        crra_final_utility=final_utility(crra),
        wdra_final_utility=final_utility(wdra),
        crra_theta_std=float(crra.theta.std()),
        wdra_theta_std=float(wdra.theta.std()),
        crra_mean_terminal_wealth=float(crra.terminal_wealth.mean()),
        wdra_mean_terminal_wealth=float(wdra.terminal_wealth.mean()),
        crra_mean_cumulative_consumption=cumulative_consumption(crra),
        wdra_mean_cumulative_consumption=cumulative_consumption(wdra),
    )


def build_report(crra: TrainReport, wdra: TrainReport) -> ComparisonReport:
    return ComparisonReport(
        crra=crra,
        wdra=wdra,
        terminal_wealth_hist=shared_histogram(crra.terminal_wealth, wdra.terminal_wealth),
        theta_hist=shared_histogram(crra.theta, wdra.theta),
        theta_traces={
            "crra": QuantileTrace.from_samples(crra.theta),
            "wdra": QuantileTrace.from_samples(wdra.theta),
        },
        consumption_traces={
            "crra": QuantileTrace.from_samples(crra.consumption),
            "wdra": QuantileTrace.from_samples(wdra.consumption),
        },
        summary=summarize(crra, wdra),
    )


def compare(paths: PathSet, config_crra: TrainConfig, config_wdra: TrainConfig) -> ComparisonReport:
    """Train both models on identical paths and seeds."""
    if config_crra.seed != config_wdra.seed:
        logger.warning(
            f"comparison configs use different seeds ({config_crra.seed} vs {config_wdra.seed})"
        )
    crra = train(paths, config_crra)
    wdra = train(paths, config_wdra)
    report = build_report(crra, wdra)
    s = report.summary
    logger.info(
        f"theta std CRRA={s.crra_theta_std:.4f} WDRA={s.wdra_theta_std:.4f}; "
        f"mean terminal wealth CRRA={s.crra_mean_terminal_wealth:.4f} WDRA={s.wdra_mean_terminal_wealth:.4f}"
    )
    return report

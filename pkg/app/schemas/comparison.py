"""
CRRA-vs-WDRA comparison schemas.
"""
from typing import Dict

import numpy as np
from pydantic import BaseModel, ConfigDict

from app.schemas.base import ArrayModel, FloatArray
from app.schemas.training import TrainReport


class Histogram(ArrayModel):
    """Counts over shared bin edges, one column per model."""

    edges: FloatArray
    crra: FloatArray
    wdra: FloatArray


class QuantileTrace(ArrayModel):
    """Per-day mean, 10th and 90th percentile across paths."""

    mean: FloatArray
    p10: FloatArray
    p90: FloatArray

    @classmethod
    def from_samples(cls, values: np.ndarray) -> "QuantileTrace":
        """Summarise a (paths, days) array column by column."""
        return cls(
            mean=values.mean(axis=0),
            p10=np.percentile(values, 10, axis=0),
            p90=np.percentile(values, 90, axis=0),
        )


class ComparisonSummary(BaseModel):
    model_config = ConfigDict(frozen=True)

    crra_final_utility: float
    wdra_final_utility: float
    crra_theta_std: float
    wdra_theta_std: float
    crra_mean_terminal_wealth: float
    wdra_mean_terminal_wealth: float
    crra_mean_cumulative_consumption: float
    wdra_mean_cumulative_consumption: float


class ComparisonReport(ArrayModel):
    """Paired outputs of the two trained models on shared paths."""

    crra: TrainReport
    wdra: TrainReport
    terminal_wealth_hist: Histogram
    theta_hist: Histogram
    theta_traces: Dict[str, QuantileTrace]
    consumption_traces: Dict[str, QuantileTrace]
    summary: ComparisonSummary

"""
Training and comparison artifacts.
"""
import json
from pathlib import Path
from typing import List

import numpy as np
import pandas as pd

from app.core.base import BaseRepository, PathLike
from app.core.exceptions import InputFileError
from app.schemas.comparison import ComparisonReport, Histogram, QuantileTrace
from app.schemas.neural import PolicyCheckpoint
from app.schemas.training import TrainReport
from app.services.neural.lstm import load_checkpoint, save_checkpoint

UTILITY_FILE = "utility_trace.csv"
TERMINAL_FILE = "terminal_wealth.csv"
THETA_FILE = "theta.csv"
CONSUMPTION_FILE = "consumption.csv"
CHECKPOINT_FILE = "checkpoint.json"
SUMMARY_FILE = "summary.json"


def quantile_frame(trace: QuantileTrace) -> pd.DataFrame:
    return pd.DataFrame(
        {"day": np.arange(len(trace.mean)), "mean": trace.mean, "p10": trace.p10, "p90": trace.p90}
    )


def histogram_frame(hist: Histogram) -> pd.DataFrame:
    return pd.DataFrame(
        {
            "bin_left": hist.edges[:-1],
            "bin_right": hist.edges[1:],
            "crra": hist.crra,
            "wdra": hist.wdra,
        }
    )


class TrainingRepository(BaseRepository[PolicyCheckpoint]):
    """Repository for one training run's report and checkpoint."""

    def load(self, name: PathLike = CHECKPOINT_FILE) -> PolicyCheckpoint:
        path = self.path(str(name))
        if not path.is_file():
            raise InputFileError(f"{path} does not exist")
        try:
            return load_checkpoint(path)
        except (json.JSONDecodeError, KeyError) as e:
            raise InputFileError(f"{path}: malformed checkpoint ({e})") from e

    def save(self, report: TrainReport) -> List[Path]:
        self.ensure_root()
        files = {
            UTILITY_FILE: pd.DataFrame(
                {
                    "epoch": np.arange(1, report.utility_trace.size + 1),
                    "expected_utility": report.utility_trace,
                }
            ),
            TERMINAL_FILE: pd.DataFrame(
                {"path": np.arange(report.terminal_wealth.size), "terminal_wealth": report.terminal_wealth}
            ),
            THETA_FILE: quantile_frame(QuantileTrace.from_samples(report.theta)),
            CONSUMPTION_FILE: quantile_frame(QuantileTrace.from_samples(report.consumption)),
        }
        written = []
        for name, frame in files.items():
            path = self.path(name)
            frame.to_csv(path, index=False)
            written.append(path)
        written.append(save_checkpoint(report.checkpoint, self.path(CHECKPOINT_FILE)))
        return written


class ComparisonRepository(BaseRepository[dict]):
    """Repository for paired CRRA/WDRA outputs.

    Each model's own report goes to a subdirectory; side-by-side tables and
    the summary sit at the root.
    """

    def load(self, name: PathLike = SUMMARY_FILE) -> dict:
        path = self.path(str(name))
        if not path.is_file():
            raise InputFileError(f"{path} does not exist")
        return json.loads(path.read_text())

    def save(self, report: ComparisonReport) -> List[Path]:
        self.ensure_root()
        written = TrainingRepository(self.root / "crra").save(report.crra)
        written += TrainingRepository(self.root / "wdra").save(report.wdra)

        utility = pd.DataFrame(
            {"crra": pd.Series(report.crra.utility_trace), "wdra": pd.Series(report.wdra.utility_trace)}
        )
        utility.insert(0, "epoch", np.arange(1, len(utility) + 1))
        traces = {
            "utility_traces.csv": utility,
            "terminal_wealth_hist.csv": histogram_frame(report.terminal_wealth_hist),
            "theta_hist.csv": histogram_frame(report.theta_hist),
            "theta_traces.csv": self._paired(report.theta_traces),
            "consumption_traces.csv": self._paired(report.consumption_traces),
        }
        for name, frame in traces.items():
            path = self.path(name)
            frame.to_csv(path, index=False)
            written.append(path)

        summary_path = self.path(SUMMARY_FILE)
        summary_path.write_text(json.dumps(report.summary.model_dump(), indent=2))
        written.append(summary_path)
        return written

    @staticmethod
    def _paired(traces) -> pd.DataFrame:
        crra, wdra = quantile_frame(traces["crra"]), quantile_frame(traces["wdra"])
        return crra.merge(wdra, on="day", suffixes=("_crra", "_wdra"))

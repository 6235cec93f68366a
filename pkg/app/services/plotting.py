"""
Static SVG figures for the ``--plot`` flag.
"""
from pathlib import Path
from typing import Dict, Mapping, Union

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402
import pandas as pd  # noqa: E402

from app.core.logging import logger  # noqa: E402
from app.schemas.comparison import Histogram, QuantileTrace  # noqa: E402
from app.schemas.simulation import PathSet  # noqa: E402

# stable element ids so identical runs write identical files
matplotlib.rcParams["svg.hashsalt"] = "wdra"

PathLike = Union[str, Path]


def _save(fig, path: PathLike) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fig.tight_layout()
    fig.savefig(path, format="svg", metadata={"Date": None})
    plt.close(fig)
    logger.debug(f"wrote {path}")
    return path


def plot_density(report: pd.DataFrame, path: PathLike) -> Path:
    """Model density against the kernel estimate."""
    fig, ax = plt.subplots(figsize=(7, 4))
    ax.plot(report["x"], report["model_density"], label="jump-diffusion")
    ax.plot(report["x"], report["kde_density"], linestyle="--", label="Gaussian KDE")
    ax.set_xlabel("daily log return")
    ax.set_ylabel("density")
    ax.legend()
    return _save(fig, path)


def plot_paths(paths: PathSet, path: PathLike, max_paths: int = 100) -> Path:
    fig, ax = plt.subplots(figsize=(7, 4))
    days = np.arange(paths.n_days + 1)
    for row in paths.prices[:max_paths]:
        ax.plot(days, row, linewidth=0.6)
    ax.set_xlabel("day")
    ax.set_ylabel("price")
    return _save(fig, path)


def plot_utility_traces(traces: Mapping[str, np.ndarray], path: PathLike) -> Path:
    fig, ax = plt.subplots(figsize=(7, 4))
    for label, trace in traces.items():
        ax.plot(np.arange(1, len(trace) + 1), trace, label=label)
    ax.set_xlabel("epoch")
    ax.set_ylabel("expected utility")
    ax.legend()
    return _save(fig, path)


def plot_histogram(hist: Histogram, path: PathLike, xlabel: str, labels: Dict[str, str] = None) -> Path:
    """Both models' counts over the shared edges."""
    labels = labels or {"crra": "CRRA", "wdra": "WDRA"}
    centres = 0.5 * (hist.edges[:-1] + hist.edges[1:])
    width = np.diff(hist.edges)
    fig, ax = plt.subplots(figsize=(7, 4))
    ax.bar(centres, hist.crra, width=width, alpha=0.5, label=labels["crra"])
    ax.bar(centres, hist.wdra, width=width, alpha=0.5, label=labels["wdra"])
    ax.set_xlabel(xlabel)
    ax.set_ylabel("paths")
    ax.legend()
    return _save(fig, path)


def plot_bands(traces: Mapping[str, QuantileTrace], path: PathLike, ylabel: str) -> Path:
    """Mean with a 10-90 percentile band per model."""
    fig, ax = plt.subplots(figsize=(7, 4))
    for label, trace in traces.items():
        days = np.arange(len(trace.mean))
        (line,) = ax.plot(days, trace.mean, label=label)
        ax.fill_between(days, trace.p10, trace.p90, alpha=0.2, color=line.get_color())
    ax.set_xlabel("day")
    ax.set_ylabel(ylabel)
    ax.legend()
    return _save(fig, path)

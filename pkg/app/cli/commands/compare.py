"""
compare: train CRRA and WDRA policies on the same paths and seed.
"""
import argparse
from pathlib import Path

from app.cli.common import RunRecorder, add_training_arguments, resolve_seed, training_fields
from app.core.base import BaseCommand
from app.core.exceptions import NonFiniteGradientError, TrainingDivergenceError
from app.repositories.paths import PathsRepository, sidecar_of
from app.repositories.training import ComparisonRepository
from app.schemas.training import TrainConfig
from app.services.comparison import compare
from app.services.plotting import plot_bands, plot_histogram, plot_utility_traces


class CompareCommand(BaseCommand):
    name = "compare"
    help = "Side-by-side CRRA and WDRA training on identical paths"

    def add_arguments(self, parser: argparse.ArgumentParser) -> None:
        add_training_arguments(parser)

    def run(self, args: argparse.Namespace) -> int:
        seed = resolve_seed(args)
        out = Path(args.out_dir)
        recorder = RunRecorder(self.name, out, seed)
        source = Path(args.paths_csv)
        recorder.input(source)
        recorder.input(sidecar_of(source))

        paths = PathsRepository(source.parent).load(source.name)
        fields = training_fields(args, seed, paths.dt)
        config_crra = TrainConfig(utility_mode="CRRA", **fields)
        config_wdra = TrainConfig(utility_mode="WDRA", **fields)
        recorder.config = {
            "paths_csv": str(source),
            "crra": config_crra.model_dump(mode="json"),
            "wdra": config_wdra.model_dump(mode="json"),
        }

        try:
            report = compare(paths, config_crra, config_wdra)
        except (TrainingDivergenceError, NonFiniteGradientError):
            recorder.finish(exit_code=3)
            raise
        recorder.wrote(ComparisonRepository(out).save(report))
        if args.plot:
            recorder.wrote(
                [
                    plot_utility_traces(
                        {"CRRA": report.crra.utility_trace, "WDRA": report.wdra.utility_trace},
                        out / "utility_traces.svg",
                    ),
                    plot_histogram(report.terminal_wealth_hist, out / "terminal_wealth_hist.svg", "terminal wealth"),
                    plot_histogram(report.theta_hist, out / "theta_hist.svg", "theta"),
                    plot_bands(report.theta_traces, out / "theta_traces.svg", "theta"),
                    plot_bands(report.consumption_traces, out / "consumption_traces.svg", "consumption"),
                ]
            )
        recorder.finish()
        return 0

"""
train: fit a CRRA or WDRA policy on a path set.
"""
import argparse
from pathlib import Path

from app.cli.common import RunRecorder, add_training_arguments, resolve_seed, training_fields
from app.core.base import BaseCommand
from app.core.exceptions import NonFiniteGradientError, TrainingDivergenceError
from app.repositories.paths import PathsRepository, sidecar_of
from app.repositories.training import TrainingRepository
from app.schemas.comparison import QuantileTrace
from app.schemas.training import TrainConfig
from app.services.plotting import plot_bands, plot_utility_traces
from app.services.training import train


class TrainCommand(BaseCommand):
    name = "train"
    help = "Train the recurrent consumption-investment policy"

    def add_arguments(self, parser: argparse.ArgumentParser) -> None:
        add_training_arguments(parser)
        parser.add_argument("--utility", choices=["CRRA", "WDRA"], default="WDRA")

    def run(self, args: argparse.Namespace) -> int:
        seed = resolve_seed(args)
        out = Path(args.out_dir)
        recorder = RunRecorder(self.name, out, seed)
        source = Path(args.paths_csv)
        recorder.input(source)
        recorder.input(sidecar_of(source))

        paths = PathsRepository(source.parent).load(source.name)
        config = TrainConfig(utility_mode=args.utility, **training_fields(args, seed, paths.dt))
        recorder.config = {"paths_csv": str(source), **config.model_dump(mode="json")}

        try:
            report = train(paths, config)
        except (TrainingDivergenceError, NonFiniteGradientError):
            recorder.finish(exit_code=3)
            raise
        recorder.wrote(TrainingRepository(out).save(report))
        if args.plot:
            label = config.utility_mode
            recorder.wrote(
                [
                    plot_utility_traces({label: report.utility_trace}, out / "utility_trace.svg"),
                    plot_bands({label: QuantileTrace.from_samples(report.theta)}, out / "theta.svg", "theta"),
                    plot_bands(
                        {label: QuantileTrace.from_samples(report.consumption)},
                        out / "consumption.svg",
                        "consumption",
                    ),
                ]
            )
        recorder.finish()
        return 0

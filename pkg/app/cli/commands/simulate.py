"""
simulate: generate price paths from given or reference parameters.
"""
import argparse
from pathlib import Path

from app.cli.common import RunRecorder, resolve_seed
from app.core.base import BaseCommand
from app.core.config import settings
from app.repositories.calibration import CalibrationRepository
from app.repositories.paths import PathsRepository
from app.repositories.returns import ReturnsRepository
from app.schemas.kou import REFERENCE_PARAMS
from app.schemas.simulation import SimConfig
from app.services.plotting import plot_paths
from app.services.simulation import paths_to_returns_sample, simulate


class SimulateCommand(BaseCommand):
    name = "simulate"
    help = "Monte-Carlo price paths under the jump-diffusion"

    def add_arguments(self, parser: argparse.ArgumentParser) -> None:
        source = parser.add_mutually_exclusive_group(required=True)
        source.add_argument("--params", help="params.json written by the calibrate command")
        source.add_argument(
            "--paper-params", action="store_true", help="use the built-in estimated parameter vector"
        )
        parser.add_argument("--s0", type=float, default=settings.S0)
        parser.add_argument("--days", type=int, default=settings.N_DAYS)
        parser.add_argument("--paths", type=int, default=settings.N_PATHS)
        parser.add_argument("--dt", type=float, default=settings.DT)

    def run(self, args: argparse.Namespace) -> int:
        seed = resolve_seed(args)
        out = Path(args.out_dir)
        recorder = RunRecorder(self.name, out, seed)
        if args.paper_params:
            params = REFERENCE_PARAMS
        else:
            recorder.input(args.params)
            params = CalibrationRepository(Path(args.params).parent).load(Path(args.params).name)
        config = SimConfig(s0=args.s0, n_days=args.days, n_paths=args.paths, dt=args.dt, seed=seed)
        recorder.config = {
            "params": params.model_dump(by_alias=True),
            "threads": args.threads,
            **config.model_dump(mode="json"),
        }

        paths = simulate(params, config, threads=args.threads)
        recorder.wrote(PathsRepository(out).save(paths))
        recorder.wrote(ReturnsRepository(out).save(paths_to_returns_sample(paths)))
        if args.plot:
            recorder.wrote([plot_paths(paths, out / "paths.svg")])
        recorder.finish()
        return 0

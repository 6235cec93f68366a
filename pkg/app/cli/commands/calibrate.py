"""
calibrate: fit the jump-diffusion to a returns CSV.
"""
import argparse
from pathlib import Path

from app.cli.common import RunRecorder, resolve_seed
from app.core.base import BaseCommand
from app.core.config import settings
from app.core.exceptions import NonConvergenceError
from app.core.logging import logger
from app.repositories.calibration import CalibrationRepository
from app.repositories.returns import ReturnsRepository
from app.schemas.calibration import CalibrationConfig
from app.services.calibration import calibrate, density_report
from app.services.plotting import plot_density


class CalibrateCommand(BaseCommand):
    name = "calibrate"
    help = "Maximum-likelihood calibration on daily log returns"

    def add_arguments(self, parser: argparse.ArgumentParser) -> None:
        parser.add_argument("returns_csv", help="CSV with a single 'log_return' column")
        parser.add_argument("--dt", type=float, default=settings.DT, help="step in years")
        parser.add_argument("--max-iters", type=int, default=settings.CALIBRATION_MAX_ITERS)
        parser.add_argument("--lr", type=float, default=settings.CALIBRATION_LR)
        parser.add_argument("--tolerance", type=float, default=settings.CALIBRATION_TOLERANCE)
        parser.add_argument("--fix-lambda", action="store_true", help="keep lambda at its outlier-count seed")
        parser.add_argument("--init", default=None, help="params.json to start from")
        parser.add_argument("--grid-size", type=int, default=512, help="points in the density report")

    def run(self, args: argparse.Namespace) -> int:
        seed = resolve_seed(args)
        out = Path(args.out_dir)
        recorder = RunRecorder(self.name, out, seed)
        source = Path(args.returns_csv)
        recorder.input(source)

        sample = ReturnsRepository(source.parent).load(source.name, dt=args.dt)
        init = None
        if args.init:
            recorder.input(args.init)
            init = CalibrationRepository(Path(args.init).parent).load(Path(args.init).name)
        config = CalibrationConfig(
            max_iters=args.max_iters,
            learning_rate=args.lr,
            tolerance=args.tolerance,
            init=init,
            seed=seed,
            fix_lambda=args.fix_lambda,
        )
        recorder.config = {"returns_csv": str(source), "dt": args.dt, **config.model_dump(mode="json")}

        result = calibrate(sample, config)
        report = density_report(result.params, sample, args.grid_size)
        recorder.wrote(CalibrationRepository(out).save(result, report))
        if args.plot:
            recorder.wrote([plot_density(report, out / "density.svg")])

        if not result.converged:
            recorder.finish(exit_code=3)
            raise NonConvergenceError(
                f"no convergence within {config.max_iters} iterations; best-seen result written",
                result=result,
            )
        recorder.finish()
        logger.info(f"calibrate: log-likelihood {result.log_likelihood:.4f} after {result.iterations} iterations")
        return 0

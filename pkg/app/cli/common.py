"""
Flags and run bookkeeping shared by every command.
"""
import argparse
import time
from pathlib import Path
from typing import Any, Dict, List, Optional

from app.core.base import PathLike, file_digest
from app.core.config import settings
from app.core.exceptions import ParameterDomainError
from app.core.logging import logger
from app.repositories.manifest import ManifestRepository
from app.schemas.manifest import RunManifest
from app.schemas.training import RiskAversionCoeffs

_COEFFS = RiskAversionCoeffs()


def add_global_arguments(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--seed", type=int, default=settings.SEED, help="seed for all randomness")
    parser.add_argument("--out-dir", default=settings.OUT_DIR, help="directory for every output file")
    parser.add_argument("--plot", action="store_true", help="also write SVG figures")
    parser.add_argument("--threads", type=int, default=settings.THREADS, help="worker threads for path generation")


def add_training_arguments(parser: argparse.ArgumentParser) -> None:
    """Economic set-up and optimiser flags; unset values fall back to settings."""
    parser.add_argument("paths_csv", help="paths.csv written by the simulate command")
    parser.add_argument("--zeta", type=float, default=settings.ZETA, help="weight of intermediate consumption")
    parser.add_argument("--eta", type=float, default=settings.DISCOUNT_RATE, help="subjective discount rate")
    parser.add_argument("--r", type=float, default=settings.RISK_FREE_RATE, help="risk-free rate")
    parser.add_argument("--w0", type=float, default=settings.W0, help="initial wealth")
    parser.add_argument("--rho", type=float, default=settings.CRRA_RHO, help="constant CRRA risk aversion")
    parser.add_argument("--b0", type=float, default=_COEFFS.b0)
    parser.add_argument("--b1", type=float, default=_COEFFS.b1)
    parser.add_argument("--b2", type=float, default=_COEFFS.b2)
    parser.add_argument("--batch-size", type=int, default=settings.BATCH_SIZE)
    parser.add_argument("--lr", type=float, default=settings.LEARNING_RATE)
    parser.add_argument("--epochs", type=int, default=settings.EPOCHS)
    parser.add_argument("--hidden", type=int, default=settings.HIDDEN_SIZE)
    parser.add_argument("--wealth-floor", type=float, default=settings.WEALTH_FLOOR)
    parser.add_argument("--wealth-ref", choices=["initial", "batch_mean"], default="initial")
    parser.add_argument("--horizon", type=int, default=None, help="expected number of days per path")
    parser.add_argument("--dt", type=float, default=None, help="step in years (default: from the paths file)")


def training_fields(args: argparse.Namespace, seed: int, dt: float) -> Dict[str, Any]:
    """TrainConfig keyword arguments from parsed flags."""
    return dict(
        zeta=args.zeta,
        eta_discount=args.eta,
        r=args.r,
        w0=args.w0,
        dt=args.dt if args.dt is not None else dt,
        rho=args.rho,
        coeffs=dict(b0=args.b0, b1=args.b1, b2=args.b2),
        batch_size=args.batch_size,
        learning_rate=args.lr,
        epochs=args.epochs,
        hidden_size=args.hidden,
        seed=seed,
        wealth_floor=args.wealth_floor,
        wealth_ref=args.wealth_ref,
        horizon=args.horizon,
    )


def resolve_seed(args: argparse.Namespace) -> int:
    """--seed if given; required in test mode, otherwise derived from the clock."""
    if args.seed is not None:
        return args.seed
    if settings.TEST_MODE:
        raise ParameterDomainError("--seed is required when TEST_MODE is set", field="seed")
    seed = time.time_ns() % (2**32)
    logger.info(f"No --seed given; using time-derived seed {seed}")
    return seed


class RunRecorder:
    """Collects inputs and outputs of one command and writes the manifest last."""

    def __init__(self, command: str, out_dir: PathLike, seed: Optional[int]):
        self.command = command
        self.out_dir = Path(out_dir)
        self.seed = seed
        self.config: Dict[str, Any] = {}
        self.inputs: Dict[str, str] = {}
        self.outputs: List[Path] = []
        self.started = time.perf_counter()

    def input(self, path: PathLike) -> None:
        path = Path(path)
        if path.is_file():
            self.inputs[str(path)] = file_digest(path)

    def wrote(self, paths: List[Path]) -> None:
        self.outputs.extend(paths)

    def finish(self, exit_code: int = 0) -> Path:
        manifest = RunManifest(
            command=self.command,
            config=self.config,
            seed=self.seed,
            input_digests=self.inputs,
            outputs=[str(p) for p in self.outputs],
            duration_seconds=time.perf_counter() - self.started,
            exit_code=exit_code,
        )
        (path,) = ManifestRepository(self.out_dir).save(manifest)
        logger.info(f"{self.command}: wrote {len(self.outputs)} files and {path}")
        return path

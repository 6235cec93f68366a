"""
Command-line application for the WDRA consumption-investment toolkit.
"""
import argparse
import sys
from typing import List, Optional

from pydantic import ValidationError

from app.cli import command_router
from app.core.config import settings
from app.core.exceptions import (
    CalibrationInitError,
    InputFileError,
    NonConvergenceError,
    NonFiniteGradientError,
    ParameterDomainError,
    ShapeError,
    TrainingDivergenceError,
)
from app.core.logging import add_run_log, logger, setup_logging

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_NON_CONVERGENCE = 3


def create_application() -> argparse.ArgumentParser:
    """Create the argument parser with every command mounted."""
    parser = argparse.ArgumentParser(
        prog="wdra",
        description=f"{settings.PROJECT_NAME}: jump-diffusion calibration, simulation "
        "and recurrent consumption-investment policies",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {settings.VERSION}")
    parser.add_argument("--log-level", default=None, help="override LOG_LEVEL for this run")
    command_router.install(parser)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    """Run one command and return its exit code."""
    parser = create_application()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return e.code if isinstance(e.code, int) else EXIT_INPUT
    if args.log_level:
        setup_logging(args.log_level)

    run_log = add_run_log(args.out_dir, args.command)
    with logger.contextualize(command=args.command):
        logger.info(f"Starting {settings.PROJECT_NAME} v{settings.VERSION}: {args.command}")
        try:
            return args.handler.run(args)
        except (InputFileError, ParameterDomainError, ShapeError, ValidationError) as e:
            line = getattr(e, "line", None)
            where = f" (line {line})" if line is not None else ""
            logger.error(f"invalid input{where}: {e}")
            return EXIT_INPUT
        except CalibrationInitError as e:
            logger.error(f"invalid starting point ({', '.join(e.parameters) or 'unknown'}): {e}")
            return EXIT_INPUT
        except NonConvergenceError as e:
            logger.error(str(e))
            return EXIT_NON_CONVERGENCE
        except TrainingDivergenceError as e:
            logger.error(f"training diverged at epoch {e.epoch}, batch {e.batch}, path {e.path}: {e}")
            return EXIT_NON_CONVERGENCE
        except NonFiniteGradientError as e:
            logger.error(f"non-finite gradient in {e.block or 'an unnamed block'}: {e}")
            return EXIT_NON_CONVERGENCE
        except Exception as e:
            logger.exception(f"unexpected error: {e}")
            raise
        finally:
            logger.remove(run_log)


if __name__ == "__main__":
    sys.exit(main())

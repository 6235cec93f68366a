"""
Logging configuration for the WDRA toolkit.
"""
import sys
from pathlib import Path
from typing import Optional, Union

from loguru import logger

from app.core.config import settings

CONSOLE_FORMAT = (
    "<green>{time:YYYY-MM-DD HH:mm:ss}</green> | <level>{level: <8}</level> | "
    "<magenta>{extra[command]}</magenta> | <cyan>{name}</cyan>:<cyan>{line}</cyan> - <level>{message}</level>"
)
FILE_FORMAT = "{time:YYYY-MM-DD HH:mm:ss.SSS} | {level: <8} | {extra[command]} | {name}:{function}:{line} - {message}"
RUN_LOG = "run.log"


def setup_logging(level: Optional[str] = None):
    """Configure console and rotating file sinks.

    Console output goes to stderr; stdout stays free for piping.
    """
    level = (level or settings.LOG_LEVEL).upper()

    logger.remove()
    logger.configure(extra={"command": "-"})

    logger.add(sys.stderr, format=CONSOLE_FORMAT, level=level, colorize=True)

    if not settings.LOG_TO_FILE:
        return

    log_dir = Path(settings.LOG_DIR)
    logger.add(
        log_dir / "app.log",
        format=FILE_FORMAT,
        level=level,
        rotation="1 day",
        retention="30 days",
        compression="zip",
    )
    logger.add(
        log_dir / "error.log",
        format=FILE_FORMAT,
        level="ERROR",
        rotation="1 day",
        retention="90 days",
        compression="zip",
    )


def add_run_log(out_dir: Union[str, Path], command: str) -> int:
    """Mirror one command's records at DEBUG into ``<out_dir>/run.log``.

    Returns the sink id; the caller removes it when the command ends.
    """
    path = Path(out_dir) / RUN_LOG
    path.parent.mkdir(parents=True, exist_ok=True)
    return logger.add(
        path,
        format=FILE_FORMAT,
        level="DEBUG",
        mode="w",
        filter=lambda record: record["extra"].get("command") == command,
    )


# Initialize logging
setup_logging()

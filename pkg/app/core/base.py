"""
Base classes for the WDRA toolkit.
"""
import argparse
import hashlib
from abc import ABC, abstractmethod
from pathlib import Path
from typing import Generic, List, TypeVar, Union

T = TypeVar("T")

PathLike = Union[str, Path]


def file_digest(path: PathLike) -> str:
    """SHA-256 hex digest of a file."""
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()


class BaseRepository(ABC, Generic[T]):
    """Base repository class for file-backed artifacts.

    A repository owns one directory; ``save`` returns every file it wrote so
    commands can list them in the run manifest.
    """

    def __init__(self, root: PathLike):
        self.root = Path(root)

    def path(self, name: str) -> Path:
        return self.root / name

    def ensure_root(self) -> Path:
        self.root.mkdir(parents=True, exist_ok=True)
        return self.root

    @abstractmethod
    def load(self, *args, **kwargs) -> T:
        """Load an artifact."""
        pass

    @abstractmethod
    def save(self, obj: T, *args, **kwargs) -> List[Path]:
        """Persist an artifact, returning the files written."""
        pass


class BaseCommand(ABC):
    """Base class for CLI commands (the controller layer)."""

    name: str = ""
    help: str = ""

    @abstractmethod
    def add_arguments(self, parser: argparse.ArgumentParser) -> None:
        """Declare command-specific flags."""
        pass

    @abstractmethod
    def run(self, args: argparse.Namespace) -> int:
        """Execute the command and return an exit code."""
        pass

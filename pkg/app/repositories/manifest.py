"""
Run manifest repository.
"""
from pathlib import Path
from typing import List

from app.core.base import BaseRepository, PathLike
from app.core.exceptions import InputFileError
from app.schemas.manifest import RunManifest

FILENAME = "manifest.json"


class ManifestRepository(BaseRepository[RunManifest]):
    """Repository for the manifest written at the end of every command."""

    def load(self, name: PathLike = FILENAME) -> RunManifest:
        path = self.path(str(name))
        if not path.is_file():
            raise InputFileError(f"{path} does not exist")
        return RunManifest.model_validate_json(path.read_text())

    def save(self, manifest: RunManifest, name: str = FILENAME) -> List[Path]:
        """Write the manifest; every listed output must already exist."""
        missing = [o for o in manifest.outputs if not Path(o).exists()]
        if missing:
            raise InputFileError(f"manifest lists missing outputs: {', '.join(missing)}")
        self.ensure_root()
        path = self.path(name)
        path.write_text(manifest.model_dump_json(indent=2))
        return [path]

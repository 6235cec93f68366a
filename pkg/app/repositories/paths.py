"""
Path-set repository: ``day,path_0,...`` CSV plus a JSON sidecar.
"""
import json
from pathlib import Path
from typing import List

import numpy as np
import pandas as pd
from pydantic import ValidationError

from app.core.base import BaseRepository, PathLike
from app.core.exceptions import InputFileError
from app.repositories.returns import numeric_column, read_csv
from app.schemas.kou import KouParams
from app.schemas.simulation import PathSet

FILENAME = "paths.csv"


def sidecar_of(path: Path) -> Path:
    return path.with_suffix(".json")


class PathsRepository(BaseRepository[PathSet]):
    """Repository for simulated price paths."""

    def load(self, name: PathLike = FILENAME) -> PathSet:
        """Read the CSV and its sidecar back into a PathSet."""
        path = self.path(str(name))
        frame = read_csv(path)
        columns = list(frame.columns)
        expected = ["day"] + [f"path_{i}" for i in range(len(columns) - 1)]
        if columns != expected or len(columns) < 2:
            raise InputFileError(f"{path}: header must be day,path_0,...,path_{{n-1}}", line=1)
        days = numeric_column(frame, "day", path)
        if not np.array_equal(days, np.arange(len(frame))):
            raise InputFileError(f"{path}: day column must run 0..{len(frame) - 1}")
        prices = np.stack([numeric_column(frame, c, path) for c in columns[1:]])

        sidecar = sidecar_of(path)
        if not sidecar.is_file():
            raise InputFileError(f"{sidecar} (path metadata) does not exist")
        try:
            meta = json.loads(sidecar.read_text())
            params = KouParams(**meta["params"])
            return PathSet(
                prices=prices,
                seed=meta["seed"],
                params=params,
                dt=meta["dt"],
                jump_counts=meta.get("jump_counts"),
            )
        except (json.JSONDecodeError, KeyError) as e:
            raise InputFileError(f"{sidecar}: malformed metadata ({e})") from e
        except ValidationError as e:
            raise InputFileError(f"{path}: {e}") from e

    def save(self, paths: PathSet, name: str = FILENAME) -> List[Path]:
        self.ensure_root()
        path = self.path(name)
        frame = pd.DataFrame(paths.prices.T, columns=[f"path_{i}" for i in range(paths.n_paths)])
        frame.insert(0, "day", np.arange(paths.n_days + 1))
        frame.to_csv(path, index=False)

        sidecar = sidecar_of(path)
        meta = {
            "params": paths.params.model_dump(by_alias=True),
            "seed": paths.seed,
            "dt": paths.dt,
            "s0": paths.s0,
            "n_days": paths.n_days,
            "n_paths": paths.n_paths,
            "jump_counts": None if paths.jump_counts is None else paths.jump_counts.tolist(),
        }
        sidecar.write_text(json.dumps(meta, indent=2))
        return [path, sidecar]

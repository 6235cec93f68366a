"""
File-backed repositories for toolkit artifacts.
"""
from app.repositories.calibration import CalibrationRepository
from app.repositories.manifest import ManifestRepository
from app.repositories.paths import PathsRepository
from app.repositories.returns import ReturnsRepository
from app.repositories.training import ComparisonRepository, TrainingRepository

__all__ = [
    "CalibrationRepository",
    "ComparisonRepository",
    "ManifestRepository",
    "PathsRepository",
    "ReturnsRepository",
    "TrainingRepository",
]

"""
Pydantic schemas for the WDRA toolkit.
"""
from app.schemas.calibration import CalibrationConfig, CalibrationResult
from app.schemas.comparison import ComparisonReport, ComparisonSummary, Histogram, QuantileTrace
from app.schemas.kou import REFERENCE_PARAMS, KouParams, ReturnSample
from app.schemas.manifest import RunManifest
from app.schemas.neural import (
    AdamHyper,
    AdamState,
    FeatureScaling,
    HeadWeights,
    LstmState,
    LstmWeights,
    PolicyCheckpoint,
    PolicyOutput,
)
from app.schemas.simulation import PathSet, SimConfig
from app.schemas.training import RiskAversionCoeffs, TrainConfig, TrainReport, WealthPath

__all__ = [
    "AdamHyper",
    "AdamState",
    "CalibrationConfig",
    "CalibrationResult",
    "ComparisonReport",
    "ComparisonSummary",
    "FeatureScaling",
    "HeadWeights",
    "Histogram",
    "KouParams",
    "LstmState",
    "LstmWeights",
    "PathSet",
    "PolicyCheckpoint",
    "PolicyOutput",
    "QuantileTrace",
    "REFERENCE_PARAMS",
    "ReturnSample",
    "RiskAversionCoeffs",
    "RunManifest",
    "SimConfig",
    "TrainConfig",
    "TrainReport",
    "WealthPath",
]

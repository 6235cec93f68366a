"""
Core configuration module for the WDRA toolkit.
"""
from typing import Optional
from pydantic_settings import BaseSettings
from pydantic import field_validator


class Settings(BaseSettings):
    """Application settings."""

    # Project
    PROJECT_NAME: str = "WDRA Consumption-Investment Toolkit"
    VERSION: str = "1.0.0"
    DEBUG: bool = False

    # Logging
    LOG_LEVEL: str = "INFO"
    LOG_DIR: str = "logs"
    LOG_TO_FILE: bool = True

    # Runs
    OUT_DIR: str = "runs"
    THREADS: int = 1
    TEST_MODE: bool = False
    SEED: Optional[int] = None

    # Simulation defaults (one trading year of daily steps)
    S0: float = 100.0
    N_DAYS: int = 247
    N_PATHS: int = 100
    DT: float = 1.0 / 247.0

    # Calibration defaults
    CALIBRATION_MAX_ITERS: int = 3000
    CALIBRATION_LR: float = 0.02
    CALIBRATION_TOLERANCE: float = 1e-7

    # Network / training defaults
    BATCH_SIZE: int = 10
    LEARNING_RATE: float = 1e-3
    EPOCHS: int = 1000
    HIDDEN_SIZE: int = 50

    # Economics (none of these are pinned down by the model itself)
    RISK_FREE_RATE: float = 0.03
    DISCOUNT_RATE: float = 0.05
    ZETA: float = 0.5
    W0: float = 1.0
    CRRA_RHO: float = 3.0
    WEALTH_FLOOR: float = 1e-3

    @field_validator("THREADS")
    @classmethod
    def check_threads(cls, v: int) -> int:
        if v < 1:
            raise ValueError("THREADS must be >= 1")
        return v

    @field_validator("LOG_LEVEL")
    @classmethod
    def normalize_log_level(cls, v: str) -> str:
        return v.upper()

    class Config:
        env_file = ".env"
        case_sensitive = True


# Global settings instance
settings = Settings()
